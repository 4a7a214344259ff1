//! Free kernel on radial functions through spherical means.
//!
//! For |x| = ρ,
//!
//! ```text
//! (Lψ)(ρ) = ħc·4π ∫₀^∞ [ψ(ρ) − M(ρ, s)] ν(s) s² ds + mc² ψ(ρ),
//! M(ρ, s) = [F(ρ + s) − F(|ρ − s|)] / (2ρs),   F(q) = ∫₀^q p ψ(p) dp,
//! ```
//!
//! with ψ interpolated by a clamped cubic spline (ψ′ = 0 at both ends) and held at its last
//! sample beyond the grid. Near s = 0 the bracket is −s²Δψ/6 + O(s⁴) and is integrated in
//! that form below [`SMALL_S`].

use super::levy_density;
use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::params::PhysicalParams;
use crate::quad::{gauss_legendre, integrate_to_infinity, QuadOptions};
use crate::spectral::RadialResult;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Below this separation the Taylor form of the spherical-mean difference is used.
pub const SMALL_S: f64 = 1e-3;
/// Below this separation M is formed from local Gauss–Legendre sums instead of F differences.
const LOCAL_S: f64 = 0.5;
/// Interpolation error estimate above which the grid is rejected.
const GRID_TOL: f64 = 1e-3;

/// Clamped cubic spline on r_i = i·h with exact antiderivative of q·S(q).
pub struct RadialSpline {
    h: f64,
    y: Vec<Complex64>,
    m: Vec<Complex64>,
    cum: Vec<Complex64>,
}

impl RadialSpline {
    pub fn new(y: &[Complex64], h: f64) -> Self {
        let n = y.len();
        // Tridiagonal system for second derivatives, clamped slopes zero at both ends.
        let mut diag = vec![4.0; n];
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        diag[0] = 2.0;
        diag[n - 1] = 2.0;
        rhs[0] = (y[1] - y[0]) * (6.0 / (h * h));
        rhs[n - 1] = -(y[n - 1] - y[n - 2]) * (6.0 / (h * h));
        for i in 1..n - 1 {
            rhs[i] = (y[i + 1] - y[i] * 2.0 + y[i - 1]) * (6.0 / (h * h));
        }
        // Thomas algorithm with unit off-diagonals.
        let mut cp = vec![0.0; n];
        let mut dp = vec![Complex64::new(0.0, 0.0); n];
        cp[0] = 1.0 / diag[0];
        dp[0] = rhs[0] / diag[0];
        for i in 1..n {
            let denom = diag[i] - cp[i - 1];
            cp[i] = 1.0 / denom;
            dp[i] = (rhs[i] - dp[i - 1]) / denom;
        }
        let mut m = vec![Complex64::new(0.0, 0.0); n];
        m[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = dp[i] - m[i + 1] * cp[i];
        }
        let mut s = RadialSpline {
            h,
            y: y.to_vec(),
            m,
            cum: vec![Complex64::new(0.0, 0.0); n],
        };
        for i in 1..n {
            s.cum[i] = s.cum[i - 1] + s.piece_integral(i - 1, h);
        }
        s
    }

    fn r_max(&self) -> f64 {
        (self.y.len() - 1) as f64 * self.h
    }

    fn coeffs(&self, i: usize) -> [Complex64; 4] {
        let h = self.h;
        let a = self.y[i];
        let b = (self.y[i + 1] - self.y[i]) / h - (self.m[i] * 2.0 + self.m[i + 1]) * (h / 6.0);
        let c = self.m[i] * 0.5;
        let d = (self.m[i + 1] - self.m[i]) / (6.0 * h);
        [a, b, c, d]
    }

    /// ∫_{r_i}^{r_i + t} q S(q) dq.
    fn piece_integral(&self, i: usize, t: f64) -> Complex64 {
        let [a, b, c, d] = self.coeffs(i);
        let ri = i as f64 * self.h;
        a * (ri * t)
            + (b * ri + a) * (t * t / 2.0)
            + (c * ri + b) * (t.powi(3) / 3.0)
            + (d * ri + c) * (t.powi(4) / 4.0)
            + d * (t.powi(5) / 5.0)
    }

    fn locate(&self, r: f64) -> (usize, f64) {
        let n = self.y.len();
        let i = ((r / self.h).floor() as usize).min(n - 2);
        (i, r - i as f64 * self.h)
    }

    pub fn value(&self, r: f64) -> Complex64 {
        if r >= self.r_max() {
            return *self.y.last().unwrap();
        }
        let (i, t) = self.locate(r);
        let [a, b, c, d] = self.coeffs(i);
        a + t * (b + t * (c + t * d))
    }

    /// Δψ = ψ″ + 2ψ′/r (3ψ″ at the origin).
    pub fn laplacian(&self, r: f64) -> Complex64 {
        if r >= self.r_max() {
            return Complex64::new(0.0, 0.0);
        }
        let (i, t) = self.locate(r);
        let [_, b, c, d] = self.coeffs(i);
        let d1 = b + t * (c * 2.0 + t * d * 3.0);
        let d2 = c * 2.0 + d * (6.0 * t);
        if r == 0.0 {
            d2 * 3.0
        } else {
            d2 + d1 * (2.0 / r)
        }
    }

    /// F(q) = ∫₀^q p ψ(p) dp.
    pub fn antiderivative(&self, q: f64) -> Complex64 {
        let rm = self.r_max();
        if q >= rm {
            let n = self.y.len();
            return self.cum[n - 1] + self.y[n - 1] * ((q * q - rm * rm) / 2.0);
        }
        let (i, t) = self.locate(q);
        self.cum[i] + self.piece_integral(i, t)
    }

    /// Knots strictly inside (a, b).
    fn knots_between(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let lo = (a / self.h).floor() as usize + 1;
        let hi = ((b / self.h).ceil() as usize).min(self.y.len() - 1);
        (lo..hi).map(move |i| i as f64 * self.h).filter(move |&k| k > a && k < b)
    }
}

/// ψ(ρ) − M(ρ, s) for ρ > 0.
fn mean_difference(sp: &RadialSpline, rho: f64, s: f64, psi_rho: Complex64, gl: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    if rho == 0.0 {
        return psi_rho - sp.value(s);
    }
    if s < LOCAL_S && s < rho {
        // −(1/2ρs) ∫_{ρ−s}^{ρ+s} (ψ(q) − ψ(ρ)) q dq, exact per spline piece.
        let a = rho - s;
        let b = rho + s;
        let mut pts = vec![a];
        pts.extend(sp.knots_between(a, b));
        pts.push(b);
        let mut acc = Complex64::new(0.0, 0.0);
        for w in pts.windows(2) {
            let (c, hw) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in gl.0.iter().zip(&gl.1) {
                let q = c + hw * x;
                acc += (sp.value(q) - psi_rho) * (q * wt * hw);
            }
        }
        return -acc / (2.0 * rho * s);
    }
    let mean = (sp.antiderivative(rho + s) - sp.antiderivative((rho - s).abs())) / (2.0 * rho * s);
    psi_rho - mean
}

/// 5/384 · max|Δ⁴ψ| / max|ψ|: the cubic-spline interpolation error estimate.
fn interpolation_error(y: &[Complex64]) -> f64 {
    let peak = y.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let d4 = y
        .windows(5)
        .map(|w| (w[0] - w[1] * 4.0 + w[2] * 6.0 - w[3] * 4.0 + w[4]).norm())
        .fold(0.0, f64::max);
    5.0 / 384.0 * d4 / peak
}

/// ħc√(−Δ + μ²) on a radial field via the singular integral.
pub fn apply_free_radial(psi: &Field, params: &PhysicalParams) -> Result<RadialResult> {
    params.validate()?;
    let (n, h) = match psi.grid {
        Grid::Radial { n, spacing } => (n, spacing),
        _ => return Err(Error::usage("apply_free_radial needs a radial grid")),
    };
    if psi.components != 1 {
        return Err(Error::usage("radial kernel application takes scalar fields"));
    }
    let interp = interpolation_error(&psi.data);
    if interp > GRID_TOL {
        return Err(Error::Accuracy {
            message: "radial grid too coarse for the field".into(),
            estimate: interp,
            tolerance: GRID_TOL,
        });
    }
    let mu = params.mu();
    let hc = params.hbar_c();
    let sp = RadialSpline::new(&psi.data, h);
    let gl = gauss_legendre(3);
    let (gx, gw) = gauss_legendre(8);
    // ∫₀^δ 4π s⁴ ν(s) ds for the Taylor piece.
    let small_weight: f64 = gx
        .iter()
        .zip(&gw)
        .map(|(x, w)| {
            let s = 0.5 * SMALL_S * (x + 1.0);
            4.0 * PI * s.powi(4) * levy_density(mu, s) * w * 0.5 * SMALL_S
        })
        .sum();
    let r_max = (n - 1) as f64 * h;
    // Natural magnitude of √(−Δ + μ²)ψ; quadrature errors are measured against it.
    let peak = psi.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = (peak * (mu + 1.0 / h)).max(1e-300);
    let opts = QuadOptions {
        abs_tol: 1e-14 * scale,
        rel_tol: 1e-10,
        max_intervals: 20_000,
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut worst = 0.0f64;
    for (i, o) in out.iter_mut().enumerate() {
        let rho = i as f64 * h;
        let psi_rho = psi.data[i];
        let taylor = -sp.laplacian(rho) * (small_weight / 6.0);
        let mut breaks = vec![SMALL_S];
        for b in [LOCAL_S, rho, r_max - rho, r_max + rho] {
            if b > SMALL_S {
                breaks.push(b);
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let q = integrate_to_infinity(
            |s: f64| mean_difference(&sp, rho, s, psi_rho, &gl) * (4.0 * PI * s * s * levy_density(mu, s)),
            &breaks,
            opts,
        )?;
        let integral = q.value + taylor;
        worst = worst.max(q.error / scale);
        *o = integral * hc + psi_rho * params.rest_energy();
    }
    Ok(RadialResult {
        field: Field::new(psi.grid, 1, out)?,
        error_estimate: interp.max(worst),
    })
}
