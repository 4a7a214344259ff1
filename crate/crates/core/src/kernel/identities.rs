//! Closed-form Laplace/Bessel identities underlying the kernel, checked by quadrature.

use crate::error::{Error, Result};
use crate::quad::{integrate_to_infinity, QuadOptions};
use crate::special::bessel_k;
use std::f64::consts::PI;

/// Quadrature value, closed form and their relative difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            residual: ((lhs - rhs) / rhs).abs(),
        }
    }
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

/// ∫₀^∞ e^{−r²/4t − (μ²+λ)t} (4πt)^{−3/2} dt against e^{−√(λ+μ²) r}/(4πr).
pub fn resolvent_kernel_identity(mu: f64, r: f64, lambda: f64) -> Result<IdentityCheck> {
    if !(mu > 0.0 && r > 0.0 && lambda >= 0.0) {
        return Err(Error::domain("need μ > 0, r > 0, λ ≥ 0"));
    }
    let m2 = mu * mu + lambda;
    let peak = r / (2.0 * m2.sqrt());
    let lhs = integrate_to_infinity(
        |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                (-r * r / (4.0 * t) - m2 * t).exp() * (4.0 * PI * t).powf(-1.5)
            }
        },
        &[0.0, peak, 4.0 * peak],
        opts(),
    )?
    .value;
    let rhs = (-m2.sqrt() * r).exp() / (4.0 * PI * r);
    Ok(IdentityCheck::new(lhs, rhs))
}

/// ∫₀^∞ e^{−√(λ+μ²) r}/r · λ^{−1/2} dλ against 2μK₁(μr)/r. With λ = σ² the integrand is
/// smooth at the origin.
pub fn spectral_density_identity(mu: f64, r: f64) -> Result<IdentityCheck> {
    if !(mu > 0.0 && r > 0.0) {
        return Err(Error::domain("need μ > 0 and r > 0"));
    }
    let lhs = integrate_to_infinity(
        |s: f64| 2.0 * (-(s * s + mu * mu).sqrt() * r).exp() / r,
        &[0.0, mu.max(1.0 / r)],
        opts(),
    )?
    .value;
    let rhs = 2.0 * mu * bessel_k(1, mu * r)? / r;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// ∫₀^∞ e^{−a/s − ps} s^{−3} ds against 2(p/a) K₂(2√(ap)).
pub fn laplace_bessel_identity(a: f64, p: f64) -> Result<IdentityCheck> {
    if !(a > 0.0 && p > 0.0) {
        return Err(Error::domain("need a > 0 and p > 0"));
    }
    let peak = (a / p).sqrt();
    let lhs = integrate_to_infinity(
        |s: f64| if s <= 0.0 { 0.0 } else { (-a / s - p * s).exp() / (s * s * s) },
        &[0.0, peak / 3.0, peak],
        opts(),
    )?
    .value;
    let rhs = 2.0 * (p / a) * bessel_k(2, 2.0 * (a * p).sqrt())?;
    Ok(IdentityCheck::new(lhs, rhs))
}
