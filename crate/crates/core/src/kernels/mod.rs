//! Gamma-product kernels for GL(3) Voronoi and Kuznetsov formulas, the
//! spectral measure, a localising test function and the one-variable
//! Mellin-Barnes kernel.

pub mod gamma;
pub mod kw4;

use num_complex::Complex64;
use std::f64::consts::PI;

pub use gamma::{cgamma, cospi, rgamma, sinpi};
pub use kw4::{kw4_eval, ContourSpec, Kw4Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("gamma pole at {0}")]
    Pole(Complex64),
    #[error("spectral parameter must sum to zero, got {0}")]
    NotTraceless(Complex64),
    #[error("spectral parameter must be purely imaginary")]
    NotTempered,
    #[error("spectral measure has a pole: a coordinate difference is an odd integer")]
    MeasurePole,
    #[error("normalising polynomial vanishes at the base point")]
    DegenerateBasePoint,
    #[error("invalid contour: {0}")]
    BadContour(String),
    #[error("truncation error estimate {estimate:e} exceeds tolerance {tol:e}")]
    Truncation { estimate: f64, tol: f64 },
}

const TRACE_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `e(t) = exp(2 pi i t)`.
pub fn e(t: Complex64) -> Complex64 {
    (2.0 * PI * I * t).exp()
}

/// Spectral parameter `(mu1, mu2, mu3)` with zero sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter(pub [Complex64; 3]);

impl SpectralParameter {
    pub fn new(mu1: Complex64, mu2: Complex64, mu3: Complex64) -> Result<Self, KernelError> {
        let sum = mu1 + mu2 + mu3;
        if sum.norm() > TRACE_TOL {
            return Err(KernelError::NotTraceless(sum));
        }
        Ok(Self([mu1, mu2, mu3]))
    }

    /// `(i a, i b, -i(a + b))`.
    pub fn imaginary(a: f64, b: f64) -> Self {
        Self([Complex64::new(0.0, a), Complex64::new(0.0, b), Complex64::new(0.0, -(a + b))])
    }

    pub fn zero() -> Self {
        Self([c(0.0); 3])
    }

    pub fn neg(&self) -> Self {
        Self(self.0.map(|m| -m))
    }

    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self(perm.map(|i| self.0[i]))
    }

    pub fn is_tempered(&self) -> bool {
        self.0.iter().all(|m| m.re.abs() <= TRACE_TOL)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.0.iter().map(|m| m.im.abs()).fold(0.0, f64::max)
    }
}

pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn sign_of(sign: i32) -> f64 {
    assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
    sign as f64
}

/// The Voronoi kernel
/// `4 (2pi)^{-3s} prod Gamma(s + mu_j) (prod cos(pi(s+mu_j)/2) +- (1/i) prod sin(pi(s+mu_j)/2))`.
pub fn voronoi_kernel(s: Complex64, mu: &SpectralParameter, sign: i32) -> Result<Complex64, KernelError> {
    let sg = sign_of(sign);
    let mut gam = c(1.0);
    let mut cos_p = c(1.0);
    let mut sin_p = c(1.0);
    for m in mu.0 {
        let w = s + m;
        gam *= cgamma(w)?;
        cos_p *= cospi(w / 2.0);
        sin_p *= sinpi(w / 2.0);
    }
    let pow = (-3.0 * s * (2.0 * PI).ln()).exp();
    Ok(4.0 * pow * gam * (cos_p + sg * sin_p / I))
}

/// The Kuznetsov long-element kernel `G~^{+-}(s, mu)`.
pub fn gtilde(s: Complex64, mu: &SpectralParameter, sign: i32) -> Result<Complex64, KernelError> {
    let sg = sign_of(sign);
    let mut even = c(1.0);
    let mut odd = c(1.0);
    for m in mu.0 {
        even *= cgamma((s - m) / 2.0)? * rgamma((1.0 - s + m) / 2.0);
        odd *= cgamma((1.0 + s - m) / 2.0)? * rgamma((2.0 - s + m) / 2.0);
    }
    let norm = (-3.0 * s * PI.ln()).exp() / (12288.0 * PI.powf(3.5));
    Ok(norm * (even + sg * I * odd))
}

/// The Weyl-symmetrised two-variable kernel `G_sym^{eps1, eps2}(s, mu)`.
pub fn gsym(
    s1: Complex64,
    s2: Complex64,
    mu: &SpectralParameter,
    eps1: i32,
    eps2: i32,
) -> Result<Complex64, KernelError> {
    let (e1, e2) = (sign_of(eps1), sign_of(eps2));
    let mut total = c(0.0);
    for d1 in 0..2 {
        for d2 in 0..2 {
            let d3 = ((d1 + d2) % 2) as f64;
            let (f1, f2) = (d1 as f64, d2 as f64);
            let sign = e1.powi(d1) * e2.powi(d2) * if d1 * d2 == 1 { -1.0 } else { 1.0 };
            let mut term = sign * cgamma((1.0 + d3 - s1 - s2) / 2.0)? * rgamma((d3 + s1 + s2) / 2.0);
            for m in mu.0 {
                term *= cgamma((f1 + s1 - m) / 2.0)?
                    * cgamma((f2 + s2 + m) / 2.0)?
                    * rgamma((1.0 + f1 - s1 + m) / 2.0)
                    * rgamma((1.0 + f2 - s2 - m) / 2.0);
            }
            total += term;
        }
    }
    Ok(total / (1024.0 * PI.powf(2.5)))
}

/// Product of two Voronoi kernels against `Gamma(1 - s1 - s2)`, summed over
/// sign pairs with `eta1 eta2 = eps1 eps2`.
pub fn vrv_kernel(
    s1: Complex64,
    s2: Complex64,
    mu0: &SpectralParameter,
    eps1: i32,
    eps2: i32,
) -> Result<Complex64, KernelError> {
    let (e1, e2) = (sign_of(eps1), sign_of(eps2));
    let g = cgamma(1.0 - s1 - s2)?;
    let neg = mu0.neg();
    let mut total = c(0.0);
    for eta1 in [1, -1] {
        let eta2 = (e1 * e2) as i32 * eta1;
        let phase = e(e2 * eta1 as f64 * (s1 + s2 - 1.0) / 4.0);
        total += g * voronoi_kernel(s1, mu0, eta1)? * voronoi_kernel(s2, &neg, eta2)? * phase;
    }
    Ok(total)
}

/// Relative gap between [`vrv_kernel`] and the rescaled `G_sym` with
/// swapped, negated signs at `-mu0`.
pub fn kernel_identity_residual(
    s1: Complex64,
    s2: Complex64,
    mu0: &SpectralParameter,
    eps1: i32,
    eps2: i32,
) -> Result<f64, KernelError> {
    if !mu0.is_tempered() {
        return Err(KernelError::NotTempered);
    }
    let lhs = vrv_kernel(s1, s2, mu0, eps1, eps2)?;
    let ssum = s1 + s2;
    let scale = 512.0 * (3.0 * (2.0 - ssum) * PI.ln()).exp() * (-ssum * 2f64.ln()).exp();
    let rhs = scale * gsym(s1, s2, &mu0.neg(), -eps2, -eps1)?;
    Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1e-300))
}

/// Relative residuals of the four gamma identities used to rewrite
/// `G_sym`: two duplication consequences at `z` and, when `z` is on the
/// imaginary axis, the reflection forms of `|Gamma(z)|^2` and `|Gamma(1/2 + z)|^2`.
pub fn gamma_identity_residuals(z: Complex64) -> Result<[f64; 4], KernelError> {
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / (a.norm() + b.norm() + 1e-300);
    let g = cgamma(z)?;
    let gh = cgamma(z + 0.5)?;
    let dup = (((1.0 - 2.0 * z) * 2f64.ln()).exp()) * PI.sqrt() * cgamma(2.0 * z)?;
    let r1 = rel(gh / cgamma(z.conj())?, dup / g.norm_sqr());
    let r2 = rel(g / cgamma(z.conj() + 0.5)?, dup / gh.norm_sqr());
    let (r3, r4) = if z.re == 0.0 {
        let refl = -PI / (z * sinpi(z));
        let half = PI / cospi(z);
        (rel(c(g.norm_sqr()), refl), rel(c(gh.norm_sqr()), half))
    } else {
        (0.0, 0.0)
    };
    Ok([r1, r2, r3, r4])
}

/// Distance from `x` to the nearest odd integer, counting only real `x`.
fn odd_integer_distance(x: Complex64) -> f64 {
    let k = ((x.re - 1.0) / 2.0).round();
    (x - (2.0 * k + 1.0)).norm()
}

/// `prod (mu_i - mu_j) tan(pi/2 (mu_i - mu_j))` over the cyclic pairs.
pub fn spec_measure(mu: &SpectralParameter) -> Result<Complex64, KernelError> {
    let [m1, m2, m3] = mu.0;
    let diffs = [m1 - m2, m2 - m3, m3 - m1];
    if diffs.iter().any(|&d| odd_integer_distance(d) < gamma::POLE_EPS) {
        return Err(KernelError::MeasurePole);
    }
    Ok(diffs.iter().map(|&d| d * sinpi(d / 2.0) / cospi(d / 2.0)).product())
}

/// `prod_{|n| <= a} prod_{i<j} (mu_i - mu_j - (2n + 1))`.
pub fn zero_polynomial(mu: &SpectralParameter, a: u32) -> Complex64 {
    let m = mu.0;
    let mut p = c(1.0);
    for n in -(a as i64)..=(a as i64) {
        let odd = (2 * n + 1) as f64;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            p *= m[i] - m[j] - odd;
        }
    }
    p
}

/// Distinct points of the Weyl orbit of `mu`.
pub fn weyl_orbit(mu: &SpectralParameter) -> Vec<SpectralParameter> {
    let mut out: Vec<SpectralParameter> = Vec::new();
    for perm in PERMUTATIONS {
        let w = mu.permuted(perm);
        let dup = out.iter().any(|o| o.0.iter().zip(w.0).all(|(a, b)| (a - b).norm() < 1e-12));
        if !dup {
            out.push(w);
        }
    }
    out
}

/// Test function localised at the Weyl orbit of `mu0`: Gaussians
/// `exp(Z sum (mu - w mu0)_i^2)` summed over the distinct orbit points,
/// times `P(mu)/P(mu0)` which kills the odd-difference hyperplanes.
pub fn test_function_hz(
    mu: &SpectralParameter,
    mu0: &SpectralParameter,
    z: f64,
    a: u32,
) -> Result<Complex64, KernelError> {
    let p0 = zero_polynomial(mu0, a);
    if p0.norm() == 0.0 {
        return Err(KernelError::DegenerateBasePoint);
    }
    let gauss: Complex64 = weyl_orbit(mu0)
        .iter()
        .map(|w| {
            let n: Complex64 = mu.0.iter().zip(w.0).map(|(x, y)| (x - y) * (x - y)).sum();
            (n * z).exp()
        })
        .sum();
    Ok(gauss * zero_polynomial(mu, a) / p0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ci(im: f64) -> Complex64 {
        Complex64::new(0.0, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / (a.norm() + b.norm())
    }

    /// Voronoi kernel with the trigonometric products written through
    /// exponentials: cos x +- (1/i) sin x-type products expanded termwise.
    fn voronoi_exponential(s: Complex64, mu: &SpectralParameter, sign: f64) -> Complex64 {
        let mut gam = c(1.0);
        let mut cos_p = c(1.0);
        let mut sin_p = c(1.0);
        for m in mu.0 {
            let x = PI * (s + m) / 2.0;
            gam *= cgamma(s + m).unwrap();
            cos_p *= ((I * x).exp() + (-I * x).exp()) / 2.0;
            sin_p *= ((I * x).exp() - (-I * x).exp()) / (2.0 * I);
        }
        4.0 * c(2.0 * PI).powc(-3.0 * s) * gam * (cos_p - I * sign * sin_p)
    }

    #[test]
    fn voronoi_at_one() {
        let want = Complex64::new(0.0, -1.0 / (2.0 * PI.powi(3)));
        let mu = SpectralParameter::zero();
        assert!(rel(voronoi_kernel(c(1.0), &mu, 1).unwrap(), want) < 1e-14);
        assert!(rel(voronoi_kernel(c(1.0), &mu, -1).unwrap(), -want) < 1e-14);
    }

    #[test]
    fn voronoi_conjugation_and_exponential_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let s = ci(rng.gen_range(-2.0..2.0));
            let mu = SpectralParameter::imaginary(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let mu_bar = SpectralParameter(mu.0.map(|m| m.conj()));
            for sign in [1, -1] {
                let v = match voronoi_kernel(s, &mu, sign) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                assert!(v.is_finite());
                // conj of (cos +- sin/i) flips the sign
                let w = voronoi_kernel(s.conj(), &mu_bar, -sign).unwrap();
                assert!((v.conj() - w).norm() <= 1e-10 * v.norm());
                assert!(rel(v, voronoi_exponential(s, &mu, sign as f64)) < 1e-11);
            }
        }
    }

    #[test]
    fn gtilde_and_gsym_are_permutation_symmetric() {
        let mu = SpectralParameter::imaginary(0.7, -0.2);
        let s = Complex64::new(0.1, 0.9);
        for perm in PERMUTATIONS {
            let m = mu.permuted(perm);
            for sign in [1, -1] {
                assert!(rel(gtilde(s, &m, sign).unwrap(), gtilde(s, &mu, sign).unwrap()) < 1e-11);
            }
            let a = gsym(ci(0.3), ci(-1.1), &m, 1, -1).unwrap();
            let b = gsym(ci(0.3), ci(-1.1), &mu, 1, -1).unwrap();
            assert!(rel(a, b) < 1e-11);
        }
    }

    /// Independent expansion of the four-term sum with explicit (d1, d2, d3) rows.
    fn gsym_rows(s1: Complex64, s2: Complex64, mu: &SpectralParameter, e1: f64, e2: f64) -> Complex64 {
        let rows = [(0.0, 0.0, 0.0, 1.0), (1.0, 0.0, 1.0, e1), (0.0, 1.0, 1.0, e2), (1.0, 1.0, 0.0, -e1 * e2)];
        let mut total = c(0.0);
        for (d1, d2, d3, coef) in rows {
            let mut t = coef * cgamma((1.0 + d3 - s1 - s2) / 2.0).unwrap() / cgamma((d3 + s1 + s2) / 2.0).unwrap();
            for m in mu.0 {
                t *= cgamma((d1 + s1 - m) / 2.0).unwrap() * cgamma((d2 + s2 + m) / 2.0).unwrap();
                t /= cgamma((1.0 + d1 - s1 + m) / 2.0).unwrap() * cgamma((1.0 + d2 - s2 - m) / 2.0).unwrap();
            }
            total += t;
        }
        total / (1024.0 * PI.powf(2.5))
    }

    #[test]
    fn gsym_example_point() {
        let mu = SpectralParameter::new(ci(0.7), ci(-0.2), ci(-0.5)).unwrap();
        let v = gsym(ci(0.3), ci(0.3), &mu, 1, 1).unwrap();
        assert!(v.is_finite());
        assert!(rel(v, gsym_rows(ci(0.3), ci(0.3), &mu, 1.0, 1.0)) < 1e-11);
        for (e1, e2) in [(1, -1), (-1, 1), (-1, -1)] {
            let v = gsym(ci(0.3), ci(-0.8), &mu, e1, e2).unwrap();
            assert!(rel(v, gsym_rows(ci(0.3), ci(-0.8), &mu, e1 as f64, e2 as f64)) < 1e-11);
        }
    }

    #[test]
    fn identity_examples() {
        let mu = SpectralParameter::new(ci(0.3), ci(0.5), ci(-0.8)).unwrap();
        assert!(kernel_identity_residual(ci(0.4), ci(-0.9), &mu, 1, -1).unwrap() < 1e-9);
        assert!(kernel_identity_residual(ci(0.25), ci(0.25), &SpectralParameter::zero(), 1, 1).unwrap() < 1e-9);
        let (s1, s2) = (Complex64::new(0.05, 0.4), Complex64::new(0.05, -0.9));
        for (e1, e2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            assert!(kernel_identity_residual(s1, s2, &mu, e1, e2).unwrap() < 1e-8);
        }
        let off = SpectralParameter::new(c(0.1), c(-0.1), c(0.0)).unwrap();
        assert_eq!(kernel_identity_residual(s1, s2, &off, 1, 1), Err(KernelError::NotTempered));
    }

    #[test]
    fn vrv_finite_on_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let mu = SpectralParameter::imaginary(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (s1, s2) = (ci(rng.gen_range(-2.0..2.0)), ci(rng.gen_range(-2.0..2.0)));
            for (e1, e2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                assert!(vrv_kernel(s1, s2, &mu, e1, e2).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn gamma_identities_on_axis() {
        for k in 1..20 {
            let z = ci(0.17 * k as f64 - 1.5);
            for r in gamma_identity_residuals(z).unwrap() {
                assert!(r < 1e-12, "{z}: {r}");
            }
        }
        // the duplication forms hold off the axis too
        let r = gamma_identity_residuals(Complex64::new(0.3, 1.2)).unwrap();
        assert!(r[0] < 1e-12 && r[1] < 1e-12);
    }

    #[test]
    fn spec_measure_structure() {
        assert_eq!(spec_measure(&SpectralParameter::zero()).unwrap(), c(0.0));
        let z = SpectralParameter::new(Complex64::new(1.0, 0.3), Complex64::new(-1.0, 0.3), ci(-0.6)).unwrap();
        assert!(spec_measure(&z).unwrap().norm() < 1e-10);
        let pole = SpectralParameter::new(c(0.5), c(-0.5), c(0.0)).unwrap();
        assert_eq!(spec_measure(&pole), Err(KernelError::MeasurePole));
        // (1, -1, 0) has two odd differences next to the even one
        let mixed = SpectralParameter::new(c(1.0), c(-1.0), c(0.0)).unwrap();
        assert_eq!(spec_measure(&mixed), Err(KernelError::MeasurePole));
        let generic = SpectralParameter::imaginary(0.4, -0.1);
        let v = spec_measure(&generic).unwrap();
        assert!(v.norm() > 0.0 && v.is_finite());
    }

    #[test]
    fn test_function_properties() {
        let mu0 = SpectralParameter::imaginary(2.0, -0.5);
        // nearest other orbit point: swap the last two coordinates, squared distance 2
        assert!((test_function_hz(&mu0, &mu0, 20.0, 2).unwrap() - 1.0).norm() < 1e-10);
        let on_zero = SpectralParameter::new(Complex64::new(1.5, 0.2), Complex64::new(-1.5, 0.2), ci(-0.4)).unwrap();
        assert!(test_function_hz(&on_zero, &mu0, 1.0, 1).unwrap().norm() < 1e-10);
        let bad = SpectralParameter::new(c(0.5), c(-0.5), c(0.0)).unwrap();
        assert_eq!(test_function_hz(&mu0, &bad, 1.0, 1), Err(KernelError::DegenerateBasePoint));
        let mut last = f64::INFINITY;
        for k in 5..20 {
            let t = k as f64;
            let mu = SpectralParameter::new(mu0.0[0] + ci(t), mu0.0[1] - ci(0.3 * t), mu0.0[2] - ci(0.7 * t)).unwrap();
            let v = test_function_hz(&mu, &mu0, 1.0, 2).unwrap().norm();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn gtilde_growth_bound() {
        let mu = SpectralParameter::imaginary(0.4, -0.1);
        let sigma = 0.1;
        let ratio = |t: f64| {
            let v = gtilde(Complex64::new(sigma, t), &mu, 1).unwrap();
            v.norm() / (1.0 + t.abs()).powf(3.0 * sigma - 1.5)
        };
        let fitted = (10..=20).flat_map(|t| [ratio(t as f64), ratio(-(t as f64))]).fold(0.0, f64::max);
        for k in 0..=90 {
            let t = 10.0 + k as f64;
            assert!(ratio(t) <= 2.0 * fitted && ratio(-t) <= 2.0 * fitted, "t={t}");
        }
    }

    #[test]
    fn traceless_check() {
        assert!(SpectralParameter::new(c(1.0), c(1.0), c(0.0)).is_err());
        assert_eq!(weyl_orbit(&SpectralParameter::zero()).len(), 1);
        assert_eq!(weyl_orbit(&SpectralParameter::imaginary(1.0, 1.0)).len(), 3);
        assert_eq!(weyl_orbit(&SpectralParameter::imaginary(1.0, 0.3)).len(), 6);
    }
}
