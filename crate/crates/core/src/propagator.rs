//! Real-time propagator U(t) = exp(−i c t √(−(∇ − ia)² + μ²)).
//!
//! The heat-type semigroup e^{−τ√(−Δ+μ²)} has the kernel
//! P_τ(r) = τμ² K₂(μ√(r² + τ²)) / (2π² (r² + τ²)), obtained by subordinating the heat
//! kernel. U(t) is its boundary value at τ = ict, reached through τ = ε|ct| + ict with
//! ε ↓ 0. Off the light cone the limit is the three-branch kernel
//! returned by [`z_kernel`]; on grids the ε-regularised kernels are integrated and
//! Richardson-extrapolated in ε.

use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::fractional::subordination_density;
use crate::kernel::radial::RadialSpline;
use crate::params::PhysicalParams;
use crate::quad::{integrate_points, integrate_to_infinity, QuadOptions};
use crate::special::{bessel_k, bessel_k_complex_scaled_all, hankel};
use crate::spectral::{axis_wavenumbers, dot, fft3, phase};
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Position relative to the light cone of the source point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LightConeRegion {
    PastTimelike,
    Spacelike,
    FutureTimelike,
}

impl LightConeRegion {
    pub fn label(&self) -> &'static str {
        match self {
            LightConeRegion::PastTimelike => "past-timelike",
            LightConeRegion::Spacelike => "spacelike",
            LightConeRegion::FutureTimelike => "future-timelike",
        }
    }
}

/// Classify (ct, r = ‖x − y‖); the cone |ct| = r is a singular-locus error.
pub fn region_classify(ct: f64, r: f64) -> Result<LightConeRegion> {
    if !(r >= 0.0) || !ct.is_finite() || !r.is_finite() {
        return Err(Error::domain("region needs finite ct and r ≥ 0"));
    }
    if ct.abs() == r {
        return Err(Error::Singularity(format!("ct = {ct} lies on the light cone r = {r}")));
    }
    Ok(if ct > r {
        LightConeRegion::FutureTimelike
    } else if ct < -r {
        LightConeRegion::PastTimelike
    } else {
        LightConeRegion::Spacelike
    })
}

/// One branch value of the real-time kernel.
#[derive(Debug, Clone, Copy)]
pub struct ZValue {
    pub region: LightConeRegion,
    /// Branch function: H₂⁽²⁾(μσ)/σ², −H₂⁽¹⁾(μσ)/σ² or −(2i/π)K₂(μs)/s².
    pub z: Complex64,
    /// Factor p with kernel = p μ² z: ct/4π on the timelike branches, −ct/4π spacelike.
    pub prefactor: f64,
}

impl ZValue {
    /// The propagator kernel for the scalar (β = +1) block.
    pub fn kernel(&self, mu: f64) -> Complex64 {
        self.z * (self.prefactor * mu * mu)
    }
}

/// Three-branch kernel off the cone, with σ² = c²t² − r² and s² = r² − c²t².
pub fn z_kernel(ct: f64, r: f64, mu: f64) -> Result<ZValue> {
    if !(mu > 0.0) {
        return Err(Error::domain("z_kernel needs μ > 0"));
    }
    let region = region_classify(ct, r)?;
    let d = ct * ct - r * r;
    let z = match region {
        LightConeRegion::FutureTimelike => hankel(2, 2, mu * d.sqrt())? / d,
        LightConeRegion::PastTimelike => -hankel(2, 1, mu * d.sqrt())? / d,
        LightConeRegion::Spacelike => {
            let s2 = -d;
            c(0.0, -2.0 / PI) * (bessel_k(2, mu * s2.sqrt())? / s2)
        }
    };
    let prefactor = match region {
        LightConeRegion::Spacelike => -ct / (4.0 * PI),
        _ => ct / (4.0 * PI),
    };
    Ok(ZValue { region, z, prefactor })
}

/// P_τ(r) for complex τ with Re √(r² + τ²) > 0 (μ ≥ 0; μ = 0 gives τ/(π²(r² + τ²)²)).
pub fn continued_kernel(tau: Complex64, r: f64, mu: f64) -> Result<Complex64> {
    let w2 = tau * tau + r * r;
    let w = w2.sqrt();
    if !(w.re > 0.0) {
        return Err(Error::Singularity(format!("√(r² + τ²) = {w} is not in the right half-plane")));
    }
    if mu == 0.0 {
        return Ok(tau / (PI * PI * w2 * w2));
    }
    let z = w * mu;
    let k2 = bessel_k_complex_scaled_all(z)?[2] * (-z).exp();
    Ok(tau * (mu * mu) * k2 / (w2 * (2.0 * PI * PI)))
}

/// Kernel of e^{−ct√(−Δ+μ²)}: (ct/4π²)·2μ²K₂(μ√(r²+c²t²))/(r²+c²t²).
pub fn subordinated_heat_kernel(r: f64, t: f64, params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) || !(r >= 0.0) {
        return Err(Error::domain("heat kernel needs t > 0 and r ≥ 0"));
    }
    Ok(continued_kernel(c(params.c * t, 0.0), r, params.mu())?.re)
}

/// Oracle: ∫₀^∞ f_{ct,1/2}(s) (4πs)^{−3/2} e^{−r²/4s − μ²s} ds.
pub fn subordination_quadrature(r: f64, t: f64, params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(Error::domain("t must be positive"));
    }
    let ct = params.c * t;
    let mu = params.mu();
    let f = |s: f64| -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        subordination_density(ct, s).unwrap_or(0.0) * (4.0 * PI * s).powf(-1.5) * (-(r * r) / (4.0 * s) - mu * mu * s).exp()
    };
    let mode = ((ct * ct + r * r) / 10.0).max(1e-12);
    let q = integrate_to_infinity(f, &[0.0, mode, 5.0 * mode, 50.0 * mode], QuadOptions::rel(1e-12))?;
    Ok(q.value)
}

/// Phase carried by the constant-A propagator kernel, e^{iκ(x−y)·a} with a = eA/ħc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// κ = 1: the gauge-covariant phase of the constant-A operator.
    Full,
    /// κ = 1/2: the phase as printed with e/2ħc.
    Half,
}

impl PhaseConvention {
    fn factor(&self) -> f64 {
        match self {
            PhaseConvention::Full => 1.0,
            PhaseConvention::Half => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PropagatorOptions {
    /// Two regularisation levels ε₁ > ε₂ for τ = ct(ε + i).
    pub eps: [f64; 2],
    pub rel_tol: f64,
    pub phase: PhaseConvention,
}

impl Default for PropagatorOptions {
    fn default() -> Self {
        PropagatorOptions {
            eps: [0.02, 0.01],
            rel_tol: 1e-10,
            phase: PhaseConvention::Full,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Propagated {
    pub field: Field,
    /// ‖U_extrapolated − U_{ε₂}‖/‖U_extrapolated‖: size of the ε correction.
    pub extrapolation_residual: f64,
    /// Largest relative quadrature error estimate.
    pub quadrature_error: f64,
}

/// τ for the regularised boundary value: ε|ct| + ict.
fn regularised_tau(ct: f64, eps: f64) -> Complex64 {
    c(eps * ct.abs(), ct)
}

/// U(t)ψ. Radial grids take scalar fields with A = 0; periodic 3D grids take scalar or
/// spinor fields and constant A. Spinor components 2 and 3 carry β = −1 (time reversed).
pub fn apply_u(psi: &Field, t: f64, a_potential: [f64; 3], params: &PhysicalParams, opts: &PropagatorOptions) -> Result<Propagated> {
    params.validate()?;
    if !t.is_finite() {
        return Err(Error::domain("t must be finite"));
    }
    if !(opts.eps[0] > opts.eps[1] && opts.eps[1] > 0.0) {
        return Err(Error::usage("regularisation levels must satisfy ε₁ > ε₂ > 0"));
    }
    let ct = params.c * t;
    if ct == 0.0 {
        return Ok(Propagated {
            field: psi.clone(),
            extrapolation_residual: 0.0,
            quadrature_error: 0.0,
        });
    }
    let mu = params.mu();
    let a = params.gauge_wavevector(a_potential);
    let levels: Vec<(Vec<Complex64>, f64)> = match psi.grid {
        Grid::Radial { .. } => {
            if psi.components != 1 {
                return Err(Error::usage("radial propagation takes scalar fields"));
            }
            if dot(a, a) != 0.0 {
                return Err(Error::usage("a vector potential breaks radial symmetry; use a periodic 3D grid"));
            }
            opts.eps
                .iter()
                .map(|&e| radial_level(psi, regularised_tau(ct, e), mu, opts.rel_tol))
                .collect::<Result<_>>()?
        }
        Grid::Periodic3d { .. } => opts
            .eps
            .iter()
            .map(|&e| periodic_level(psi, ct, e, mu, a, opts))
            .collect::<Result<_>>()?,
        Grid::Open3d { .. } => return Err(Error::usage("propagation runs on radial or periodic grids")),
    };
    let (e1, e2) = (opts.eps[0], opts.eps[1]);
    let w1 = -e2 / (e1 - e2);
    let w2 = e1 / (e1 - e2);
    let ext: Vec<Complex64> = levels[0].0.iter().zip(&levels[1].0).map(|(u1, u2)| u1 * w1 + u2 * w2).collect();
    let norm = ext.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let resid = ext.iter().zip(&levels[1].0).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() / norm;
    Ok(Propagated {
        field: Field::new(psi.grid, psi.components, ext)?,
        extrapolation_residual: resid,
        quadrature_error: levels[0].1.max(levels[1].1),
    })
}

/// ∫₀^∞ 4πs² P_τ(s) M(ρ, s) ds with exact spline spherical means.
fn radial_level(psi: &Field, tau: Complex64, mu: f64, rel_tol: f64) -> Result<(Vec<Complex64>, f64)> {
    let (n, h) = match psi.grid {
        Grid::Radial { n, spacing } => (n, spacing),
        _ => unreachable!(),
    };
    let sp = RadialSpline::new(&psi.data, h);
    let r_max = (n - 1) as f64 * h;
    let cone = tau.im.abs();
    let width = tau.re.max(1e-12);
    let peak = psi.data.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let opts = QuadOptions {
        abs_tol: rel_tol * 1e-2 * peak,
        rel_tol,
        max_intervals: 20_000,
    };
    let mut out = vec![c(0.0, 0.0); n];
    let mut worst = 0.0f64;
    for (i, o) in out.iter_mut().enumerate() {
        let rho = i as f64 * h;
        let mean = |s: f64| -> Complex64 {
            if rho == 0.0 || s == 0.0 {
                sp.value(s.max(rho))
            } else {
                (sp.antiderivative(rho + s) - sp.antiderivative((rho - s).abs())) / (2.0 * rho * s)
            }
        };
        let mut breaks = vec![0.0];
        for b in [
            cone - 20.0 * width,
            cone - 4.0 * width,
            cone - width,
            cone,
            cone + width,
            cone + 4.0 * width,
            cone + 20.0 * width,
            rho,
            (r_max - rho).abs(),
            r_max + rho,
        ] {
            if b > 0.0 {
                breaks.push(b);
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        let q = integrate_to_infinity(
            |s: f64| {
                let p = continued_kernel(tau, s, mu).expect("Re τ > 0 keeps the kernel regular");
                p * mean(s) * (4.0 * PI * s * s)
            },
            &breaks,
            opts,
        )?;
        worst = worst.max(q.error / peak);
        *o = q.value;
    }
    Ok((out, worst))
}

/// Multiplier m(q) = ∫₀^∞ 4πs² P_τ(s) sin(qs)/(qs) ds tabulated on a uniform q grid and
/// interpolated with four-point Lagrange cubics.
struct MultiplierTable {
    dq: f64,
    values: Vec<Complex64>,
    error: f64,
}

impl MultiplierTable {
    fn build(tau: Complex64, mu: f64, q_max: f64, rel_tol: f64) -> Result<Self> {
        let dq = 0.01;
        let n = (q_max / dq).ceil() as usize + 4;
        let cone = tau.im.abs();
        let width = tau.re.max(1e-12);
        let opts = QuadOptions {
            abs_tol: rel_tol * 1e-2,
            rel_tol,
            max_intervals: 20_000,
        };
        let mut breaks = vec![0.0];
        for b in [cone - 20.0 * width, cone - 4.0 * width, cone - width, cone, cone + width, cone + 4.0 * width, cone + 20.0 * width] {
            if b > 0.0 {
                breaks.push(b);
            }
        }
        let mut values = Vec::with_capacity(n);
        let mut error = 0.0f64;
        for j in 0..n {
            let q = j as f64 * dq;
            let sinc = |s: f64| {
                let x = q * s;
                if x.abs() < 1e-4 {
                    1.0 - x * x / 6.0
                } else {
                    x.sin() / x
                }
            };
            let mut pts = breaks.clone();
            let far = (60.0 / mu.max(1e-3)).max(pts.last().copied().unwrap_or(0.0) * 2.0 + 1.0);
            // Oscillation of sinc: add a breakpoint every few periods.
            if q > 0.0 {
                let period = 2.0 * PI / q;
                let mut s = 4.0 * period;
                while s < far {
                    pts.push(s);
                    s += 4.0 * period;
                }
            }
            pts.push(far);
            pts.sort_by(f64::total_cmp);
            pts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
            let r = integrate_points(
                |s: f64| continued_kernel(tau, s, mu).expect("regular kernel") * (4.0 * PI * s * s * sinc(s)),
                &pts,
                opts,
            )?;
            error = error.max(r.error);
            values.push(r.value);
        }
        Ok(MultiplierTable { dq, values, error })
    }

    fn eval(&self, q: f64) -> Complex64 {
        let x = q / self.dq;
        let i = (x.floor() as usize).clamp(1, self.values.len() - 3);
        let t = x - i as f64;
        let y = |k: usize| self.values[k];
        // Lagrange on nodes i−1, i, i+1, i+2.
        let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        y(i - 1) * l0 + y(i) * l1 + y(i + 1) * l2 + y(i + 2) * l3
    }
}

/// One ε level on a periodic grid: the phase-modulated radial kernel becomes the multiplier
/// m(|k − κa|), and the lower spinor block uses t → −t.
fn periodic_level(psi: &Field, ct: f64, eps: f64, mu: f64, a: [f64; 3], opts: &PropagatorOptions) -> Result<(Vec<Complex64>, f64)> {
    let dims = psi.grid.dims3().expect("3D grid");
    let h = psi.grid.spacing();
    let kappa = opts.phase.factor();
    let shift = [a[0] * kappa, a[1] * kappa, a[2] * kappa];
    let kx = axis_wavenumbers(dims[0], h);
    let ky = axis_wavenumbers(dims[1], h);
    let kz = axis_wavenumbers(dims[2], h);
    let kmax = |k: &[f64], s: f64| k.iter().map(|v| (v - s).abs()).fold(0.0, f64::max);
    let q_max = (kmax(&kx, shift[0]).powi(2) + kmax(&ky, shift[1]).powi(2) + kmax(&kz, shift[2]).powi(2)).sqrt();
    let needs_lower = psi.components == 4;
    let upper = MultiplierTable::build(regularised_tau(ct, eps), mu, q_max, opts.rel_tol)?;
    let lower = if needs_lower {
        Some(MultiplierTable::build(regularised_tau(-ct, eps), mu, q_max, opts.rel_tol)?)
    } else {
        None
    };
    let mut out = psi.clone();
    for comp in 0..psi.components {
        let table = if comp >= 2 { lower.as_ref().unwrap() } else { &upper };
        let mut buf = psi.component(comp).data;
        fft3(&mut buf, dims, false);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let q = [kx[i] - shift[0], ky[j] - shift[1], kz[k] - shift[2]];
                    buf[(i * dims[1] + j) * dims[2] + k] *= table.eval(dot(q, q).sqrt());
                }
            }
        }
        fft3(&mut buf, dims, true);
        for (p, v) in buf.into_iter().enumerate() {
            out.data[p * psi.components + comp] = v;
        }
    }
    Ok((out.data, upper.error.max(lower.map(|l| l.error).unwrap_or(0.0))))
}

/// Kernel tabulation rows (ct, r, Re, Im, region) for the scalar block; cone points are
/// skipped.
pub fn tabulate(cts: &[f64], rs: &[f64], mu: f64) -> Result<Vec<(f64, f64, Complex64, LightConeRegion)>> {
    let mut rows = Vec::new();
    for &ct in cts {
        for &r in rs {
            match z_kernel(ct, r, mu) {
                Ok(z) => rows.push((ct, r, z.kernel(mu), z.region)),
                Err(Error::Singularity(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(rows)
}

/// Phase applied by hand in the gauge-conjugation check: e^{iκ a·x}.
pub fn gauge_phase(x: [f64; 3], a: [f64; 3], convention: PhaseConvention) -> Complex64 {
    phase(convention.factor() * dot(a, x))
}
