//! The local factor at `p` of the constant in the main term, computed as a
//! finite signed sum over prime-power exponents.
//!
//! Each summation variable is the `p`-adic valuation of one of the divisor
//! variables.  The sum is split into nine blocks according to which of the
//! squarefree variables `tau10 r0 r s g0 g h1 h2` is divisible by `p`; the
//! four variables `f0 d01 d10 d20` stabilise once their valuation reaches a
//! threshold and are summed in closed form through geometric tails.

use num_complex::Complex64;

use crate::arith::is_prime;
use crate::hecke::{schur_coeff, SatakeTriple};

macro_rules! exponent_vector {
    ($($name:ident),* $(,)?) => {
        /// Valuations of the summation variables, in summation order.
        #[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
        pub struct EulerExponentVector {
            $(pub $name: i64,)*
        }

        impl EulerExponentVector {
            pub const NAMES: &'static [&'static str] = &[$(stringify!($name)),*];

            pub fn get(&self, name: &str) -> Option<i64> {
                match name {
                    $(stringify!($name) => Some(self.$name),)*
                    _ => None,
                }
            }

            pub fn get_mut(&mut self, name: &str) -> Option<&mut i64> {
                match name {
                    $(stringify!($name) => Some(&mut self.$name),)*
                    _ => None,
                }
            }

            pub fn to_array(&self) -> [i64; EXPONENT_COUNT] {
                [$(self.$name),*]
            }

            pub fn from_array(v: [i64; EXPONENT_COUNT]) -> Self {
                let [$($name),*] = v;
                Self { $($name),* }
            }
        }
    };
}

pub const EXPONENT_COUNT: usize = 27;

exponent_vector!(
    tau10, r0, r, s, g0, g, h1, h2, c0, omega, omega0, a, a0, b, d, n1, m0, n10, nu0, alpha0, alpha, nu, d0, f0, d01,
    d10, d20,
);

/// Stand-in exponent for the `(...)^infinity` term in the valuation of the
/// congruence modulus.
pub const INFINITY_EXPONENT: i64 = 20;

impl EulerExponentVector {
    pub fn cap_a(&self) -> i64 {
        self.m0
            + self.alpha0
            + self.omega0
            + self.nu0
            + self.nu
            + self.tau10
            + self.n10
            + self.r0
            + self.s
            + self.d20
            + self.f0
            + self.g0
    }

    pub fn cap_b(&self) -> i64 {
        self.alpha0
            + self.omega0
            + self.nu0
            + self.nu
            + self.tau10
            + self.n10
            + self.d20
            + self.f0
            + self.g0
            + self.g
            + self.h1
            - self.n1
    }

    pub fn x(&self) -> i64 {
        let e = self;
        e.a + e.b + e.m0 + e.n1 + e.r + e.s + 2 * e.g - 2 * e.alpha0 - e.alpha
            + e.omega
            + e.alpha0
            + e.omega0
            + e.nu
            + e.s
            - e.d0
            - e.g.min(e.alpha0 + e.omega0 + e.nu)
            + e.nu0
            + e.tau10
            + e.r0
            + e.f0
            + e.g0
            + e.h1
            + e.h2
    }

    pub fn y(&self) -> i64 {
        let e = self;
        e.nu0 + e.tau10 + e.r0 + e.f0 + e.g0 + e.nu + e.r + e.s + e.g + e.h1 + e.m0 + e.omega0 + e.a0
    }

    pub fn all_nonnegative(&self) -> bool {
        self.to_array().iter().all(|&v| v >= 0)
    }
}

/// Valuation of the congruence modulus with `(...)^infinity` replaced by
/// the power `inf`.
pub fn mcal_valuation_with(e: &EulerExponentVector, inf: i64) -> i64 {
    let mn = (e.alpha + e.omega + e.a).min(e.d20 + e.f0 + e.g0 + e.m0 + e.g);
    let inner = (e.alpha0 + e.alpha + e.omega0 + e.omega + e.nu0 + e.nu + e.tau10 + e.n10 + e.r0 + e.s)
        .min(e.alpha + e.omega + e.a + e.g - mn + inf * (e.d0 + e.d20 + e.f0 + e.g0 + e.m0 + e.g - mn));
    2 * e.r0 + e.n10 + e.alpha0 + e.alpha + e.omega0 + e.omega + e.nu0 + e.nu + e.tau10 + e.m0 + e.n1 + e.s
        - (e.r + e.s + 3 * e.g + 2 * e.h1 + e.b).min(e.r0 + e.m0 + e.n1 + inner)
}

pub fn mcal_valuation(e: &EulerExponentVector) -> i64 {
    mcal_valuation_with(e, INFINITY_EXPONENT)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EulerError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent of m must be 0, 1 or 2, got {0}")]
    BadExponent(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerFactorSpec {
    pub p: u64,
    pub m_exp: u32,
    pub satake: SatakeTriple,
}

impl EulerFactorSpec {
    pub fn new(p: u64, m_exp: u32, satake: SatakeTriple) -> Result<Self, EulerError> {
        if !is_prime(p) {
            return Err(EulerError::NotPrime(p));
        }
        if m_exp > 2 {
            return Err(EulerError::BadExponent(m_exp));
        }
        Ok(Self { p, m_exp, satake })
    }
}

fn delta(a: i64, b: i64) -> i64 {
    if b == 0 && a > 0 {
        0
    } else {
        1
    }
}

/// The guard conjunction of the summand: squarefreeness, coprimality,
/// divisibility and the congruence condition `M | m`.
pub fn summand_admissible(e: &EulerExponentVector, m_exp: i64, inf: i64) -> bool {
    let EulerExponentVector {
        tau10,
        r0,
        r,
        s,
        g0,
        g,
        h1,
        h2,
        c0,
        omega,
        omega0,
        a,
        a0,
        b,
        d,
        n1,
        m0,
        n10,
        nu0,
        alpha0,
        alpha,
        nu,
        d0,
        f0,
        d01,
        d10,
        d20,
    } = *e;
    let x = e.x();
    let y = e.y();
    tau10 + r0 + r + s + g0 + g + h1 + h2 <= 1
        && c0 + r0 <= 1
        && a0 + a <= 1
        && r0 + omega0 + omega - r0.min(d10) <= 1
        && (d - d.min(x)) * y == 0
        && (tau10 + r0 + g0) * nu0 == 0
        && f0 * (tau10 + g0) == 0
        && d01 * (tau10 + n10 + r0 + d10 + d20 + g0) == 0
        && d10 * (nu0 + d20 + g0) == 0
        && d20 * (nu0 + tau10 + r0) == 0
        && d10.min(r0).min(f0) == 0
        && (nu + r + s + g + h1 + h2) * (nu0 + tau10 + r0 + f0 + g0) == 0
        && (nu + r + s + g + h1) * h2 == 0
        && c0 * (nu0 + d01 + d10) == 0
        && n1 * d20 == 0
        && m0 * (nu + g - n1.min(nu + g) + nu0 + tau10 + r0 + f0 + g0 + h1 + h2) == 0
        && (f0 + g0 + m0 + g - alpha - omega) * (m0 + n1 + r + r0 + s + 2 * g - 2 * alpha0 - 2 * alpha) == 0
        && omega0 * (alpha + nu0 + tau10 + r0 + f0 + g0 + h1 + h2) == 0
        && a0 * (m0 + n1 + r + s + 2 * g - 2 * alpha0 - alpha + omega + nu0 + tau10 + r0 + f0 + g0 + h1 + h2) == 0
        && b * (a0 + d20 + f0 + g0 + m0 + g - alpha - omega) == 0
        && d0 * (a + b + m0 + n1 + r + s + 2 * g - 2 * alpha0 - alpha + omega + h1) == 0
        && mcal_valuation_with(e, inf) <= m_exp
        && c0 <= f0
        && n1 <= nu0 + nu + tau10 + n10 + f0 + g0 + g + h1
        && alpha0 <= (r + s + 2 * g).min(m0 + n1)
        && alpha <= (m0 + g).min(r + s + 2 * g - alpha0).min(m0 + n1 - alpha0)
        && alpha + omega <= f0 + g0 + m0 + g
        && m0 + n1 + g <= alpha0 + alpha + omega0 + omega + nu0 + nu + tau10 + n10 + (m0 + n1).min(g + h1)
        && a <= e.cap_a()
        && b <= e.cap_b()
        && d0 <= alpha0 + omega0 + nu + s - g.min(alpha0 + omega0 + nu)
        && delta(n10 + d01 + d10 + d20, nu0 + tau10 + r0 + f0 + g0) == 1
}

/// Value of an admissible term; does not re-check the guards.
fn term_value(e: &EulerExponentVector, spec: &EulerFactorSpec) -> Complex64 {
    let p = spec.p as f64;
    let tail = |n: i32| 1.0 / (1.0 - p.powi(-n));
    let m = spec.m_exp as i64;
    let sign_exp =
        e.tau10 + e.r + e.g0 + e.h2 + e.c0 + e.a0 + e.a + e.b + e.d + e.r0 + e.omega0 + e.omega - e.r0.min(e.d10);
    let sign = if sign_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let power = -3 * e.nu0
        - e.nu
        - 6 * e.tau10
        - e.n10
        - 4 * e.r0
        - 2 * e.r
        - 3 * e.s
        - 2 * e.d01
        - e.d10
        - e.d20
        - 3 * e.f0
        - 5 * e.g0
        - 4 * e.g
        - 4 * e.h1
        - 3 * e.h2
        + e.r0.min(e.d10)
        - e.c0
        + e.alpha
        - e.m0
        - e.omega0
        - 2 * e.a0
        - e.a
        - e.b
        - e.d0
        - 3 * e.d
        + 2 * e.d.min(e.x());
    let mut scalar = sign * p.powi(power as i32);
    if e.tau10 != 0 {
        scalar *= p.powi(e.tau10 as i32 - 1) * (p - 1.0);
    }
    if e.y() == 0 {
        scalar *= tail(2);
    }
    if e.f0 == 3 {
        scalar *= tail(3);
    }
    if e.d01 == 1 {
        scalar *= tail(2);
    }
    if e.d10 == 1 {
        scalar *= tail(1);
    }
    if e.d20 == 1 {
        scalar *= tail(1);
    }
    if e.nu0 + e.r0 + e.d01 + e.f0 >= 1 && e.c0 + e.r0 + e.d20 - e.r0.min(e.d10) == 0 {
        scalar *= 1.0 - 1.0 / p;
    }
    let t = &spec.satake;
    let first = schur_coeff(t, e.m0 + e.n1, e.r + 3 * e.g + 3 * e.h1 - 2 * (e.r0 + e.m0 + e.n1) + m);
    let second = schur_coeff(t, e.r0 + e.r, 0);
    first * second * scalar
}

pub fn euler_summand_with(e: &EulerExponentVector, spec: &EulerFactorSpec, inf: i64) -> Complex64 {
    if !e.all_nonnegative() || !summand_admissible(e, spec.m_exp as i64, inf) {
        return Complex64::new(0.0, 0.0);
    }
    term_value(e, spec)
}

pub fn euler_summand(e: &EulerExponentVector, spec: &EulerFactorSpec) -> Complex64 {
    euler_summand_with(e, spec, INFINITY_EXPONENT)
}

/// Inclusive range for every variable of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub lo: [i64; EXPONENT_COUNT],
    pub hi: [i64; EXPONENT_COUNT],
}

/// Variables whose valuation is bounded by the guards rather than summed in
/// closed form or forced squarefree.
pub const BOUNDED_VARIABLES: [&str; 8] = ["n1", "m0", "n10", "nu0", "alpha0", "alpha", "nu", "d0"];

fn index(name: &str) -> usize {
    EulerExponentVector::NAMES.iter().position(|n| *n == name).expect("known variable")
}

fn block(fixed: &[(&str, i64)], upper: &[(&str, i64)]) -> Block {
    let mut lo = [0; EXPONENT_COUNT];
    let mut hi = [0; EXPONENT_COUNT];
    for name in ["omega", "omega0", "a", "a0", "b", "d"] {
        hi[index(name)] = 1;
    }
    for (name, v) in fixed {
        lo[index(name)] = *v;
        hi[index(name)] = *v;
    }
    for (name, v) in upper {
        hi[index(name)] = *v;
    }
    Block { lo, hi }
}

/// The nine blocks of the sum, each with its exponent ranges.
pub fn blocks() -> Vec<Block> {
    let common =
        |n1m0: i64, nu: i64, d0: i64| vec![("n1", n1m0), ("m0", n1m0), ("n10", 2), ("nu0", 3), ("nu", nu), ("d0", d0)];
    let with = |mut v: Vec<(&'static str, i64)>, extra: &[(&'static str, i64)]| {
        v.extend_from_slice(extra);
        v
    };
    vec![
        block(&[("h2", 1)], &common(1, 3, 2)),
        block(&[("h1", 1)], &common(2, 5, 2)),
        block(&[("g", 1)], &with(common(2, 6, 5), &[("alpha0", 2), ("alpha", 2)])),
        block(&[("g0", 1)], &with(common(1, 3, 2), &[("d20", 1)])),
        block(&[("s", 1)], &with(common(1, 4, 3), &[("alpha0", 1), ("alpha", 1)])),
        block(&[("r", 1)], &with(common(2, 4, 3), &[("alpha0", 1), ("alpha", 1)])),
        block(&[("r0", 1)], &with(common(1, 3, 2), &[("c0", 1), ("d10", 1)])),
        block(&[("tau10", 1)], &with(common(1, 3, 2), &[("d10", 1)])),
        block(&[], &with(common(1, 3, 2), &[("c0", 1), ("f0", 3), ("d01", 1), ("d10", 1), ("d20", 1)])),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumOptions {
    pub infinity_exponent: i64,
    /// Added to the upper limit of every variable in [`BOUNDED_VARIABLES`].
    pub extend: i64,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self { infinity_exponent: INFINITY_EXPONENT, extend: 0 }
    }
}

/// The admissible exponent vectors for one exponent of `m`.  They depend
/// neither on `p` nor on the Satake parameters, so one enumeration serves
/// every factor with the same `m_exp`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerTerms {
    pub m_exp: u32,
    pub options: SumOptions,
    /// Per block, in block order.
    pub terms: Vec<Vec<EulerExponentVector>>,
}

impl EulerTerms {
    pub fn enumerate(m_exp: u32, options: SumOptions) -> Self {
        let extended: Vec<usize> = BOUNDED_VARIABLES.iter().map(|n| index(n)).collect();
        let mut terms = Vec::new();
        for blk in blocks() {
            let mut hi = blk.hi;
            for &i in &extended {
                hi[i] += options.extend;
            }
            let mut cur = blk.lo;
            let mut found = Vec::new();
            'odometer: loop {
                let e = EulerExponentVector::from_array(cur);
                if summand_admissible(&e, m_exp as i64, options.infinity_exponent) {
                    found.push(e);
                }
                let mut k = EXPONENT_COUNT;
                loop {
                    if k == 0 {
                        break 'odometer;
                    }
                    k -= 1;
                    if cur[k] < hi[k] {
                        cur[k] += 1;
                        break;
                    }
                    cur[k] = blk.lo[k];
                }
            }
            terms.push(found);
        }
        Self { m_exp, options, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of the terms, block by block in a fixed order.
    pub fn evaluate(&self, spec: &EulerFactorSpec) -> Complex64 {
        assert_eq!(spec.m_exp, self.m_exp, "terms were enumerated for another m");
        self.terms
            .iter()
            .map(|blk| blk.iter().fold(Complex64::new(0.0, 0.0), |acc, e| acc + term_value(e, spec)))
            .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
    }
}

pub fn euler_factor(spec: &EulerFactorSpec) -> Complex64 {
    EulerTerms::enumerate(spec.m_exp, SumOptions::default()).evaluate(spec)
}

/// `B(1, p^m) ((1 + p^-2)(1 - p^-2)^2 - p^-2 (1 - 1/p)^2 B(p, p))`.
pub fn closed_form_factor(spec: &EulerFactorSpec) -> Complex64 {
    let p = spec.p as f64;
    let t = &spec.satake;
    let q = p.powi(-2);
    let base = (1.0 + q) * (1.0 - q).powi(2) - q * (1.0 - 1.0 / p).powi(2) * schur_coeff(t, 1, 1);
    schur_coeff(t, 0, spec.m_exp as i64) * base
}

/// Largest change in the factor, over the given specs, when the stand-in
/// for the infinite power is raised from 20 to 40.
pub fn infinity_exponent_sensitivity(specs: &[EulerFactorSpec]) -> f64 {
    let mut worst: f64 = 0.0;
    for m_exp in 0..=2u32 {
        let base = EulerTerms::enumerate(m_exp, SumOptions::default());
        let raised = EulerTerms::enumerate(m_exp, SumOptions { infinity_exponent: 40, extend: 0 });
        for s in specs.iter().filter(|s| s.m_exp == m_exp) {
            worst = worst.max((base.evaluate(s) - raised.evaluate(s)).norm());
        }
    }
    worst
}
