//! Hecke coefficients generated from Satake parameters.
//!
//! Locally `B(p^k, p^l)` is the Schur polynomial `s_(k+l, k, 0)` of the
//! Satake triple at `p`.  We evaluate it through the 2x2 Jacobi-Trudi
//! determinant in the complete homogeneous polynomials `h_n`, which never
//! divides and therefore stays exact at repeated parameters.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::arith::{self, ArithError};

pub type HeckeValue = Complex64;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatakeTriple {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeckeError {
    #[error("Satake parameters must have modulus 1 and product 1")]
    NotUnitary,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

impl SatakeTriple {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Result<Self, HeckeError> {
        let t = Self { alpha, beta, gamma };
        let unit = [alpha, beta, gamma].iter().all(|z| (z.norm() - 1.0).abs() <= UNIT_TOL);
        if !unit || (alpha * beta * gamma - 1.0).norm() > UNIT_TOL {
            return Err(HeckeError::NotUnitary);
        }
        Ok(t)
    }

    /// The triple `(e^{ia}, e^{ib}, e^{-i(a+b)})`.
    pub fn from_angles(a: f64, b: f64) -> Self {
        Self {
            alpha: Complex64::from_polar(1.0, a),
            beta: Complex64::from_polar(1.0, b),
            gamma: Complex64::from_polar(1.0, -(a + b)),
        }
    }

    pub fn trivial() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { alpha: one, beta: one, gamma: one }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        Self::from_angles(rng.gen::<f64>() * tau, rng.gen::<f64>() * tau)
    }

    pub fn conj(&self) -> Self {
        Self { alpha: self.alpha.conj(), beta: self.beta.conj(), gamma: self.gamma.conj() }
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    fn elementary(&self) -> (Complex64, Complex64, Complex64) {
        let (a, b, c) = (self.alpha, self.beta, self.gamma);
        (a + b + c, a * b + b * c + c * a, a * b * c)
    }

    /// `h_0, ..., h_n` via `h_n = e1 h_{n-1} - e2 h_{n-2} + e3 h_{n-3}`.
    pub fn complete_homogeneous(&self, n: usize) -> Vec<Complex64> {
        let (e1, e2, e3) = self.elementary();
        let mut h = Vec::with_capacity(n + 1);
        h.push(Complex64::new(1.0, 0.0));
        for k in 1..=n {
            let mut v = e1 * h[k - 1];
            if k >= 2 {
                v -= e2 * h[k - 2];
            }
            if k >= 3 {
                v += e3 * h[k - 3];
            }
            h.push(v);
        }
        h
    }
}

/// `B(p^k, p^l)` for the Satake triple at `p`; zero if either index is negative.
pub fn schur_coeff(t: &SatakeTriple, k: i64, l: i64) -> HeckeValue {
    if k < 0 || l < 0 {
        return Complex64::new(0.0, 0.0);
    }
    let (l1, l2) = ((k + l) as usize, k as usize);
    let h = t.complete_homogeneous(l1 + 1);
    let mut v = h[l1] * h[l2];
    if l2 >= 1 {
        v -= h[l1 + 1] * h[l2 - 1];
    }
    v
}

/// Satake data for finitely many primes; every other prime uses `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamAssignment {
    pub default: SatakeTriple,
    pub at: BTreeMap<u64, SatakeTriple>,
}

impl ParamAssignment {
    pub fn uniform(default: SatakeTriple) -> Self {
        Self { default, at: BTreeMap::new() }
    }

    /// Independent random triples at every prime up to `bound`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, bound: u64) -> Self {
        let default = SatakeTriple::random(rng);
        let at = arith::primes_up_to(bound).into_iter().map(|p| (p, SatakeTriple::random(rng))).collect();
        Self { default, at }
    }

    pub fn triple(&self, p: u64) -> &SatakeTriple {
        self.at.get(&p).unwrap_or(&self.default)
    }
}

/// `B(m, n)` as the product of local Schur coefficients.
pub fn seq_value(a: &ParamAssignment, m: u64, n: u64) -> Result<HeckeValue, HeckeError> {
    assert!(m >= 1 && n >= 1, "Hecke indices are positive");
    let mut primes: BTreeMap<u64, (u32, u32)> = BTreeMap::new();
    for (p, e) in arith::factorize(m)? {
        primes.entry(p).or_default().0 = e;
    }
    for (p, e) in arith::factorize(n)? {
        primes.entry(p).or_default().1 = e;
    }
    Ok(primes.into_iter().map(|(p, (k, l))| schur_coeff(a.triple(p), k as i64, l as i64)).product())
}

/// All `B(a, b)` with `a b <= limit`, filled from a smallest-prime-factor sieve.
pub struct HeckeTable {
    limit: usize,
    rows: Vec<Vec<Complex64>>,
}

impl HeckeTable {
    pub fn new(a: &ParamAssignment, limit: usize) -> Self {
        let spf = smallest_prime_factors(limit);
        let factor = |mut n: usize| {
            let mut out: Vec<(usize, i64)> = Vec::new();
            while n > 1 {
                let p = spf[n];
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
            out
        };
        let mut rows = vec![Vec::new()];
        for i in 1..=limit {
            let fi = factor(i);
            let row = (1..=limit / i)
                .map(|j| {
                    let fj = factor(j);
                    let mut v = Complex64::new(1.0, 0.0);
                    let mut merged: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
                    for &(p, e) in &fi {
                        merged.entry(p).or_default().0 = e;
                    }
                    for &(p, e) in &fj {
                        merged.entry(p).or_default().1 = e;
                    }
                    for (p, (k, l)) in merged {
                        v *= schur_coeff(a.triple(p as u64), k, l);
                    }
                    v
                })
                .collect();
            rows.push(row);
        }
        Self { limit, rows }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Panics when `a b` exceeds the table limit.
    pub fn get(&self, a: u64, b: u64) -> Complex64 {
        self.rows[a as usize][b as usize - 1]
    }
}

fn smallest_prime_factors(n: usize) -> Vec<usize> {
    let mut spf = vec![0; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    spf
}

fn divs(n: u64) -> Vec<u64> {
    arith::divisors(n)
}

/// Anything that can produce `B(m, n)`.
pub trait HeckeSource {
    fn b(&self, m: u64, n: u64) -> Complex64;
}

impl HeckeSource for HeckeTable {
    fn b(&self, m: u64, n: u64) -> Complex64 {
        self.get(m, n)
    }
}

impl HeckeSource for ParamAssignment {
    fn b(&self, m: u64, n: u64) -> Complex64 {
        seq_value(self, m, n).expect("index within factorisation cap")
    }
}

/// Residuals of the two divisor-sum Hecke relations and of conjugate symmetry.
pub fn hecke_relation_residual<S: HeckeSource>(s: &S, n: u64, m1: u64, m2: u64) -> f64 {
    let a = |x, y| s.b(x, y);
    let base = a(m1, m2);
    let mut right = Complex64::new(0.0, 0.0);
    let mut left = Complex64::new(0.0, 0.0);
    for d0 in divs(n) {
        for d1 in divs(n / d0) {
            let d2 = n / d0 / d1;
            if m1 % d1 != 0 || m2 % d2 != 0 {
                continue;
            }
            right += a(m1 * d0 / d1, m2 * d1 / d2);
            left += a(m1 * d2 / d1, m2 * d0 / d2);
        }
    }
    let r1 = (a(n, 1) * base - right).norm();
    let r2 = (a(1, n) * base - left).norm();
    let r3 = (base - a(m2, m1).conj()).norm();
    r1.max(r2).max(r3)
}

/// Residual of both Möbius-inversion identities.
pub fn mobius_identity_residual<S: HeckeSource>(s: &S, m: u64, n: u64) -> f64 {
    let a = |x, y| s.b(x, y);
    let g = arith::gcd(m as i64, n as i64) as u64;
    let first: Complex64 = divs(g).into_iter().map(|d| arith::mobius(d) as f64 * a(m / d, 1) * a(1, n / d)).sum();
    let mut second = Complex64::new(0.0, 0.0);
    for c in divs(m) {
        if n % c != 0 {
            continue;
        }
        for b in divs(c) {
            if (n / c) % b != 0 {
                continue;
            }
            let coef = arith::mobius(b) * arith::mobius(c);
            if coef != 0 {
                second += coef as f64 * a(m / c, c / b) * a(n / c / b, 1);
            }
        }
    }
    (a(m, n) - first).norm().max((a(m * n, 1) - second).norm())
}

/// Residual of the three-variable Möbius formula for `B(n1 n2, m)` and its dual.
pub fn three_variable_residual<S: HeckeSource>(s: &S, n1: u64, n2: u64, m: u64) -> f64 {
    let a = |x, y| s.b(x, y);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dual = Complex64::new(0.0, 0.0);
    for c in divs(n1) {
        if n2 % c != 0 {
            continue;
        }
        let mu_c = arith::mobius(c);
        if mu_c == 0 {
            continue;
        }
        for b in divs(n1 / c) {
            if (m * c) % b != 0 {
                continue;
            }
            let coef = (arith::mobius(b) * mu_c) as f64;
            if coef == 0.0 {
                continue;
            }
            let aa = n1 / c / b;
            sum += coef * a(n2 / c, m * c / b) * a(aa, 1);
            dual += coef * a(m * c / b, n2 / c) * a(1, aa);
        }
    }
    (a(n1 * n2, m) - sum).norm().max((a(m, n1 * n2) - dual).norm())
}

pub fn check_hecke_relations(a: &ParamAssignment, n: u64, m1: u64, m2: u64) -> f64 {
    hecke_relation_residual(a, n, m1, m2)
}

pub fn check_mobius_identities(a: &ParamAssignment, m: u64, n: u64) -> f64 {
    mobius_identity_residual(a, m, n)
}

pub fn check_lemma_hecke(a: &ParamAssignment, n1: u64, n2: u64, m: u64) -> f64 {
    three_variable_residual(a, n1, n2, m)
}

/// Largest supported order of [`rankin_local_series`].
pub const MAX_RANKIN_ORDER: usize = 20;

/// Coefficients `0..=order` of the local Rankin-Selberg series, computed
/// directly from Hecke coefficients (`lhs`) and as the product of the
/// `(1 - a_i conj(a_j) x)^{-1}` factors with the degree-6 correction (`rhs`).
pub fn rankin_local_series(t: &SatakeTriple, order: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    assert!(order <= MAX_RANKIN_ORDER, "order at most {MAX_RANKIN_ORDER}");
    let lhs = (0..=order as i64).map(|k| schur_coeff(t, 0, k) * schur_coeff(t, k, 0)).collect();

    let zero = Complex64::new(0.0, 0.0);
    let mut rhs = vec![zero; order + 1];
    rhs[0] = Complex64::new(1.0, 0.0);
    let params = t.as_array();
    for ai in params {
        for aj in params {
            let c = ai * aj.conj();
            // multiply by 1/(1 - c x) in place
            for k in 1..=order {
                let prev = rhs[k - 1];
                rhs[k] += c * prev;
            }
        }
    }
    let bpp = schur_coeff(t, 1, 1);
    let correction =
        [Complex64::new(1.0, 0.0), zero, -1.0 - bpp, 2.0 * bpp, -1.0 - bpp, zero, Complex64::new(1.0, 0.0)];
    let mut out = vec![zero; order + 1];
    for (i, r) in rhs.iter().enumerate() {
        for (j, c) in correction.iter().enumerate() {
            if i + j <= order {
                out[i + j] += r * c;
            }
        }
    }
    (lhs, out)
}
