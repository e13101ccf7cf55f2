//! Complete exponential sums by direct enumeration over residues: classical
//! Kloosterman and Ramanujan sums and the two GL(3) Kloosterman sums.
//!
//! Phases are reduced to exact residues `k mod q` before the single
//! floating-point evaluation of `exp(2 pi i k / q)`.

use num_complex::Complex64;

use crate::arith::{ext_gcd, gcd, mod_inv};

pub const DEFAULT_MODULUS_CAP: i64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpSumError {
    #[error("modulus must be positive, got {0}")]
    BadModulus(i64),
    #[error("short Kloosterman sum needs D1 | D2, got D1={0}, D2={1}")]
    NotDivisible(i64, i64),
    #[error("D1*D2 = {0} exceeds the enumeration cap {1}")]
    CapExceeded(i64, i64),
}

/// `exp(2 pi i k / q)` with `k` reduced first.
pub fn e_frac(k: i64, q: i64) -> Complex64 {
    let r = k.rem_euclid(q) as f64 / q as f64;
    Complex64::from_polar(1.0, std::f64::consts::TAU * r)
}

fn check_modulus(c: i64) -> Result<(), ExpSumError> {
    if c < 1 {
        return Err(ExpSumError::BadModulus(c));
    }
    Ok(())
}

/// Classical `S(n, m; c)`.
pub fn kloosterman(n: i64, m: i64, c: i64) -> Result<Complex64, ExpSumError> {
    check_modulus(c)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..c {
        if let Some(xb) = unit_inverse(x, c) {
            acc += e_frac(n.rem_euclid(c) * x + m.rem_euclid(c) * xb, c);
        }
    }
    Ok(acc)
}

/// Ramanujan sum `c_q(n)`.
pub fn ramanujan(n: i64, q: i64) -> Result<Complex64, ExpSumError> {
    kloosterman(n, 0, q)
}

/// The short GL(3) Kloosterman sum, defined for `d1 | d2`.
pub fn gl3_short(n1: i64, n2: i64, m1: i64, d1: i64, d2: i64) -> Result<Complex64, ExpSumError> {
    check_modulus(d1)?;
    check_modulus(d2)?;
    if d2 % d1 != 0 {
        return Err(ExpSumError::NotDivisible(d1, d2));
    }
    let q = d2 / d1;
    let mut acc = Complex64::new(0.0, 0.0);
    for c1 in 0..d1 {
        let Some(c1b) = unit_inverse(c1, d1) else { continue };
        for c2 in 0..d2 {
            let Some(c2b) = unit_inverse(c2, q) else { continue };
            // common denominator d2 = d1 q
            let num = (n2.rem_euclid(d1) * c1b % d1 * c2.rem_euclid(d1) + n1.rem_euclid(d1) * c1) * q
                + m1.rem_euclid(q) * c2b * d1;
            acc += e_frac(num, d2);
        }
    }
    Ok(acc)
}

/// Inverse of `x` modulo `q` when `gcd(x, q) = 1`; modulo 1 everything is a unit.
fn unit_inverse(x: i64, q: i64) -> Option<i64> {
    if gcd(x, q) != 1 {
        return None;
    }
    mod_inv(x, q)
}

/// Arguments of the long-element sum, named as in `S(n1, m2, m1, n2; D1, D2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KloostermanArgs {
    pub n1: i64,
    pub n2: i64,
    pub m1: i64,
    pub m2: i64,
    pub d1: i64,
    pub d2: i64,
}

impl KloostermanArgs {
    pub fn new(n1: i64, m2: i64, m1: i64, n2: i64, d1: i64, d2: i64) -> Self {
        Self { n1, n2, m1, m2, d1, d2 }
    }

    fn validate(&self, cap: i64) -> Result<(), ExpSumError> {
        check_modulus(self.d1)?;
        check_modulus(self.d2)?;
        let prod = self.d1 * self.d2;
        if prod > cap {
            return Err(ExpSumError::CapExceeded(prod, cap));
        }
        Ok(())
    }
}

/// `(Y, Z)` with `Y b + Z c = 1 (mod d)`, assuming `gcd(b, c, d) = 1`.
///
/// Take the Bezout pair for `g = gcd(b, c)` and scale by the inverse of `g`
/// modulo `d`; `shift` moves to the equally valid `(Y + shift c, Z - shift b)`.
pub fn bezout_pair(b: i64, c: i64, d: i64, shift: i64) -> (i64, i64) {
    if d == 1 {
        return (0, 0);
    }
    let (g, u, v) = ext_gcd(b, c);
    let gi = mod_inv(g, d).expect("gcd(b, c) is a unit modulo d");
    let y = (u.rem_euclid(d) * gi + shift * c).rem_euclid(d);
    let z = (v.rem_euclid(d) * gi - shift * b).rem_euclid(d);
    (y, z)
}

/// The long-element GL(3) Kloosterman sum.
pub fn gl3_long(args: &KloostermanArgs) -> Result<Complex64, ExpSumError> {
    gl3_long_with(args, 0, DEFAULT_MODULUS_CAP)
}

/// [`gl3_long`] with an explicit Bezout-pair shift and modulus cap.
pub fn gl3_long_with(args: &KloostermanArgs, shift: i64, cap: i64) -> Result<Complex64, ExpSumError> {
    args.validate(cap)?;
    let KloostermanArgs { n1, n2, m1, m2, d1, d2 } = *args;
    let (n1, m1) = (n1.rem_euclid(d1), m1.rem_euclid(d1));
    let (n2, m2) = (n2.rem_euclid(d2), m2.rem_euclid(d2));
    let modulus = d1 * d2;
    let mut acc = Complex64::new(0.0, 0.0);
    for b1 in 0..d1 {
        for c1 in 0..d1 {
            if gcd(gcd(b1, c1), d1) != 1 {
                continue;
            }
            let (y1, z1) = bezout_pair(b1, c1, d1, shift);
            for b2 in 0..d2 {
                // d1 c2 = -(b1 b2 + d2 c1) mod d1 d2 fixes c2 mod d2
                let t = (b1 * b2 + d2 * c1) % modulus;
                if t % d1 != 0 {
                    continue;
                }
                let c2 = (-(t / d1)).rem_euclid(d2);
                if gcd(gcd(b2, c2), d2) != 1 {
                    continue;
                }
                let (y2, z2) = bezout_pair(b2, c2, d2, shift);
                let first = (n1 * b1 + m1 * ((y1 * d2 - z1 * b2).rem_euclid(d1))).rem_euclid(d1);
                let second = (m2 * b2 + n2 * ((y2 * d1 - z2 * b1).rem_euclid(d2))).rem_euclid(d2);
                acc += e_frac(first * d2 + second * d1, modulus);
            }
        }
    }
    Ok(acc)
}

/// Right-hand side of the factorisation of [`gl3_long`] into products of
/// classical Kloosterman sums, summed over `d0 | gcd(d1, d2)`.
pub fn kn_decompose_rhs(args: &KloostermanArgs) -> Result<Complex64, ExpSumError> {
    args.validate(DEFAULT_MODULUS_CAP)?;
    let KloostermanArgs { n1, n2, m1, m2, d1, d2 } = *args;
    let g = gcd(d1, d2);
    let mut acc = Complex64::new(0.0, 0.0);
    for d0 in 1..=g {
        if g % d0 != 0 {
            continue;
        }
        for alpha in 0..d0 {
            let Some(alpha_inv) = unit_inverse(alpha, d0) else { continue };
            if (m1 * (d2 / d0) + m2 * (d1 / d0) * alpha).rem_euclid(d0) != 0 {
                continue;
            }
            let x = m1 * d2 + m2 * d1 * alpha;
            let y = m1 * d2 * alpha_inv + m2 * d1;
            let sq = d0 * d0;
            debug_assert!(x % sq == 0 && y % sq == 0);
            let k1 = kloosterman(n1, x / sq, d1 / d0)?;
            let k2 = kloosterman(n2, y / sq, d2 / d0)?;
            acc += d0 as f64 * k1 * k2;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisors, euler_phi, mobius};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kloosterman_examples() {
        assert!(close(kloosterman(1, 1, 1).unwrap(), c(1.0), 1e-15));
        for q in 1..30 {
            assert!(close(kloosterman(0, 0, q).unwrap(), c(euler_phi(q as u64) as f64), 1e-10));
        }
        // S(1,1;5) = 2cos(2pi/5) + 2cos(4pi/5) + ... ; real and within Weil
        let s = kloosterman(1, 1, 5).unwrap();
        let direct: f64 = [1, 2, 3, 4]
            .iter()
            .map(|&x: &i64| {
                let xb = mod_inv(x, 5).unwrap();
                (std::f64::consts::TAU * (x + xb) as f64 / 5.0).cos()
            })
            .sum();
        assert!(close(s, c(direct), 1e-12));
        assert!(s.norm() <= 2.0 * 5f64.sqrt());
        assert!(kloosterman(1, 1, 0).is_err());
    }

    #[test]
    fn ramanujan_matches_divisor_sum() {
        assert!(close(ramanujan(6, 4).unwrap(), c(-2.0), 1e-12));
        for q in 1..40i64 {
            assert!(close(ramanujan(1, q).unwrap(), c(mobius(q as u64) as f64), 1e-10));
            for n in -10..30i64 {
                let g = gcd(n, q) as u64;
                let want: i64 = divisors(g).into_iter().map(|d| d as i64 * mobius(q as u64 / d)).sum();
                assert!(close(ramanujan(n, q).unwrap(), c(want as f64), 1e-9));
            }
        }
    }

    #[test]
    fn short_sum_examples() {
        assert!(close(gl3_short(3, -2, 5, 1, 1).unwrap(), c(1.0), 1e-15));
        // hand enumeration: C1 = 1, C2 in {0, 1}: e(1/2) + e(1) = 0
        assert!(close(gl3_short(1, 1, 1, 2, 2).unwrap(), c(0.0), 1e-12));
        // C1 in {1,2}; C2 ranges over 9 residues but only C2 mod 3 matters for n2=0
        assert!(close(gl3_short(1, 0, 1, 3, 9).unwrap(), c(3.0), 1e-12));
        assert_eq!(gl3_short(1, 1, 1, 2, 3), Err(ExpSumError::NotDivisible(2, 3)));
    }

    #[test]
    fn long_sum_examples() {
        let one = KloostermanArgs::new(1, 1, 1, 1, 1, 1);
        assert!(close(gl3_long(&one).unwrap(), c(1.0), 1e-15));
        let a = KloostermanArgs::new(1, 1, 1, 1, 2, 3);
        let want = kloosterman(1, 3, 2).unwrap() * kloosterman(1, 2, 3).unwrap();
        assert!(close(gl3_long(&a).unwrap(), want, 1e-10));
        assert!(close(kn_decompose_rhs(&a).unwrap(), want, 1e-10));
        let b = KloostermanArgs::new(2, 1, 1, 3, 4, 6);
        assert!(close(gl3_long(&b).unwrap(), kn_decompose_rhs(&b).unwrap(), 1e-8));
        let big = KloostermanArgs::new(1, 1, 1, 1, 200, 200);
        assert!(matches!(gl3_long(&big), Err(ExpSumError::CapExceeded(40_000, _))));
    }

    #[test]
    fn bezout_pairs_are_valid() {
        for d in 1..20 {
            for b in 0..d {
                for cc in 0..d {
                    if gcd(gcd(b, cc), d) != 1 {
                        continue;
                    }
                    for shift in 0..3 {
                        let (y, z) = bezout_pair(b, cc, d, shift);
                        assert_eq!((y * b + z * cc - 1).rem_euclid(d), 0, "b={b} c={cc} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn long_sum_independent_of_bezout_choice() {
        for d1 in 1..7 {
            for d2 in 1..7 {
                let a = KloostermanArgs::new(1, 2, 1, 0, d1, d2);
                let x = gl3_long_with(&a, 0, DEFAULT_MODULUS_CAP).unwrap();
                let y = gl3_long_with(&a, 3, DEFAULT_MODULUS_CAP).unwrap();
                assert!(close(x, y, 1e-9));
            }
        }
    }
}
