//! The one-variable Mellin-Barnes kernel
//! `K(y; mu) = (1/2 pi i) int |y|^{-s} G~^{sgn y}(s, mu) ds`.
//!
//! On a vertical line the integrand decays only like a power of `|Im s|`,
//! so we integrate along an equivalent contour instead: the segment
//! `Re s = sigma, |Im s| <= height`, continued by two rays that leave its
//! ends at 45 degrees into the left half-plane.  All poles sit at
//! `s = mu_j - 2n` with `|Im s| = |Im mu_j| < height`, so no pole lies
//! between this contour and the vertical line, while along the rays the
//! gamma ratio decays faster than any exponential.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use super::{gtilde, KernelError, SpectralParameter};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Abscissa of the vertical segment, in `(0, 1/6)`.
    pub sigma: f64,
    /// Half-height of the vertical segment; must exceed `max |Im mu_j|`.
    pub height: f64,
    /// Length of each bent ray.
    pub tail: f64,
    /// Width of one Gauss-Legendre panel.
    pub step: f64,
    /// Largest acceptable truncation-error estimate, relative to the value.
    pub tol: f64,
}

impl ContourSpec {
    pub fn for_mu(mu: &SpectralParameter) -> Self {
        Self { sigma: 0.1, height: mu.max_abs_im() + 3.0, tail: 30.0, step: 0.25, tol: 1e-10 }
    }

    fn validate(&self, mu: &SpectralParameter) -> Result<(), KernelError> {
        let bad = |m: &str| Err(KernelError::BadContour(m.to_string()));
        if !(self.sigma > 0.0 && self.sigma < 1.0 / 6.0) {
            return bad("sigma must lie in (0, 1/6)");
        }
        if !(self.height > mu.max_abs_im()) {
            return bad("segment height must clear every pole");
        }
        if !(self.step > 0.0 && self.tail > 0.0) {
            return bad("step and tail must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kw4Value {
    pub value: Complex64,
    /// Size of the integrand at the far ends of the rays, a bound for the
    /// discarded part since the integrand decays super-exponentially there.
    pub truncation: f64,
    /// Change in the value when the panel width is halved.
    pub quadrature: f64,
}

const GL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` with panels of
/// width at most `step`, accumulated in panel order.
fn integrate<F>(f: F, a: f64, b: f64, step: f64, rule: &[(f64, f64)]) -> Result<Complex64, KernelError>
where
    F: Fn(f64) -> Result<Complex64, KernelError>,
{
    let panels = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for &(x, w) in rule {
            total += w * f(mid + 0.5 * h * x)?;
        }
    }
    Ok(total * (0.5 * h))
}

/// Evaluates the kernel on the bent contour described by `c`.
///
/// Segment panels are at most `sigma` wide, because the integrand has poles
/// at distance `sigma` to the left of the segment.
pub fn kw4_eval(y: f64, mu: &SpectralParameter, c: &ContourSpec) -> Result<Kw4Value, KernelError> {
    assert!(y != 0.0, "y must be nonzero");
    if !mu.is_tempered() {
        return Err(KernelError::NotTempered);
    }
    c.validate(mu)?;
    let coarse = contour_integral(y, mu, c, c.step)?;
    let fine = contour_integral(y, mu, c, c.step / 2.0)?;
    let (sd, cd) = FRAC_PI_4.sin_cos();
    let sign = if y > 0.0 { 1 } else { -1 };
    let log_y = y.abs().ln();
    let f = |s: Complex64| -> Result<f64, KernelError> { Ok(((-s * log_y).exp() * gtilde(s, mu, sign)?).norm()) };
    let ends = f(Complex64::new(c.sigma - c.tail * sd, c.height + c.tail * cd))?
        + f(Complex64::new(c.sigma - c.tail * sd, -c.height - c.tail * cd))?;
    let truncation = ends / (2.0 * PI);
    let quadrature = (fine - coarse).norm();
    let bound = c.tol * fine.norm();
    if truncation > bound || quadrature > bound {
        return Err(KernelError::Truncation { estimate: truncation.max(quadrature), tol: bound });
    }
    Ok(Kw4Value { value: fine, truncation, quadrature })
}

fn contour_integral(y: f64, mu: &SpectralParameter, c: &ContourSpec, step: f64) -> Result<Complex64, KernelError> {
    let sign = if y > 0.0 { 1 } else { -1 };
    let log_y = y.abs().ln();
    let f = |s: Complex64| -> Result<Complex64, KernelError> { Ok((-s * log_y).exp() * gtilde(s, mu, sign)?) };
    let rule = gauss_legendre(GL_ORDER);
    let i = Complex64::new(0.0, 1.0);

    // ds = i dt on the segment
    let seg_step = step.min(c.sigma);
    let seg = integrate(|t| Ok(f(Complex64::new(c.sigma, t))? * i), -c.height, c.height, seg_step, &rule)?;
    let (sd, cd) = FRAC_PI_4.sin_cos();
    let up_dir = Complex64::new(-sd, cd);
    let down_dir = Complex64::new(-sd, -cd);
    let up_start = Complex64::new(c.sigma, c.height);
    let down_start = Complex64::new(c.sigma, -c.height);
    let up = integrate(|u| Ok(f(up_start + u * up_dir)? * up_dir), 0.0, c.tail, step, &rule)?;
    let down = integrate(|u| Ok(f(down_start + u * down_dir)? * down_dir), 0.0, c.tail, step, &rule)?;
    Ok((seg + up - down) / (2.0 * PI * i))
}
