//! Fourier-multiplier reference implementation of ħc√(−(∇ − ia)² + μ²) and its unitary
//! group, on periodic boxes (3D FFT) and on radial samples (sine transform).

use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::fractional::Semigroup;
use crate::linalg::{c, CVector};
use crate::params::PhysicalParams;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// √(c²ħ²|k|² + m²c⁴).
pub fn symbol(k: [f64; 3], params: &PhysicalParams) -> f64 {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    symbol_k2(k2, params)
}

fn symbol_k2(k2: f64, p: &PhysicalParams) -> f64 {
    let hc = p.hbar_c();
    let mc2 = p.rest_energy();
    (hc * hc * k2 + mc2 * mc2).sqrt()
}

/// Angular wavenumbers of an n-point periodic axis with spacing h, in FFT order.
pub fn axis_wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * h);
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            m * dk
        })
        .collect()
}

/// In-place 3D FFT of row-major data (z fastest). The inverse is normalised.
pub fn fft3(data: &mut [Complex64], dims: [usize; 3], inverse: bool) {
    let mut planner = FftPlanner::new();
    let [nx, ny, nz] = dims;
    let plan = |n: usize, p: &mut FftPlanner<f64>| {
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    };
    let fz = plan(nz, &mut planner);
    for row in data.chunks_mut(nz) {
        fz.process(row);
    }
    let fy = plan(ny, &mut planner);
    let mut buf = vec![Complex64::new(0.0, 0.0); ny.max(nx)];
    for i in 0..nx {
        for k in 0..nz {
            for j in 0..ny {
                buf[j] = data[(i * ny + j) * nz + k];
            }
            fy.process(&mut buf[..ny]);
            for j in 0..ny {
                data[(i * ny + j) * nz + k] = buf[j];
            }
        }
    }
    let fx = plan(nx, &mut planner);
    for j in 0..ny {
        for k in 0..nz {
            for i in 0..nx {
                buf[i] = data[(i * ny + j) * nz + k];
            }
            fx.process(&mut buf[..nx]);
            for i in 0..nx {
                data[(i * ny + j) * nz + k] = buf[i];
            }
        }
    }
    if inverse {
        let s = 1.0 / (nx * ny * nz) as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}

/// Apply a multiplier m(k) to every component of a field on a periodic box.
/// `m` receives the wavevector and the component index.
pub fn apply_multiplier(psi: &Field, m: impl Fn([f64; 3], usize) -> Complex64) -> Result<Field> {
    let (dims, h) = match psi.grid {
        Grid::Periodic3d { dims, spacing } => (dims, spacing),
        _ => return Err(Error::usage("Fourier multipliers need a periodic 3D grid")),
    };
    let kx = axis_wavenumbers(dims[0], h);
    let ky = axis_wavenumbers(dims[1], h);
    let kz = axis_wavenumbers(dims[2], h);
    let mut out = psi.clone();
    for comp in 0..psi.components {
        let mut buf = psi.component(comp).data;
        fft3(&mut buf, dims, false);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let idx = (i * dims[1] + j) * dims[2] + k;
                    buf[idx] *= m([kx[i], ky[j], kz[k]], comp);
                }
            }
        }
        fft3(&mut buf, dims, true);
        for (p, v) in buf.into_iter().enumerate() {
            out.data[p * psi.components + comp] = v;
        }
    }
    Ok(out)
}

/// ħc√(−Δ + μ²) on a periodic grid; with `gauge_a` the conjugated operator
/// e^{ia·x} Op e^{−ia·x}.
pub fn apply_spectral(psi: &Field, params: &PhysicalParams, gauge_a: Option<[f64; 3]>) -> Result<Field> {
    match gauge_a {
        None => apply_multiplier(psi, |k, _| c(symbol(k, params), 0.0)),
        Some(a) => {
            let shifted = psi.modulate(|x| phase(-dot(a, x)));
            let applied = apply_multiplier(&shifted, |k, _| c(symbol(k, params), 0.0))?;
            Ok(applied.modulate(|x| phase(dot(a, x))))
        }
    }
}

/// Unitary evolution exp(−i t β S(k)/ħ); spinor components 2 and 3 carry β = −1.
pub fn evolve_spectral(psi: &Field, t: f64, params: &PhysicalParams) -> Result<Field> {
    let hbar = params.hbar;
    match psi.grid {
        Grid::Radial { .. } => {
            if psi.is_spinor() {
                return Err(Error::usage("radial evolution is scalar only"));
            }
            radial_apply_multiplier(psi, |k| phase(-t * symbol_k2(k * k, params) / hbar)).map(|r| r.field)
        }
        _ => apply_multiplier(psi, |k, comp| {
            let beta = if comp >= 2 { -1.0 } else { 1.0 };
            phase(-beta * t * symbol(k, params) / hbar)
        }),
    }
}

/// e^{iθ}.
pub fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Radial transform output with its accuracy estimate.
#[derive(Debug, Clone)]
pub struct RadialResult {
    pub field: Field,
    /// Relative size of the edge samples and of the highest-wavenumber content.
    pub error_estimate: f64,
}

/// Sine-transform coefficients S_m = Σ_{j=1}^{n-1} u_j sin(π j m / n), m = 0..n.
fn dst1(u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len();
    let mut x = vec![Complex64::new(0.0, 0.0); 2 * n];
    for j in 1..n {
        x[j] = u[j];
        x[2 * n - j] = -u[j];
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(2 * n).process(&mut x);
    x.truncate(n);
    x.into_iter().map(|v| v * Complex64::new(0.0, 0.5)).collect()
}

/// Spherically symmetric multiplier m(|k|) applied through the 3D sine transform.
/// The field is treated as zero at r = n·h.
pub fn radial_apply_multiplier(psi: &Field, m: impl Fn(f64) -> Complex64) -> Result<RadialResult> {
    let (n, h) = match psi.grid {
        Grid::Radial { n, spacing } => (n, spacing),
        _ => return Err(Error::usage("radial transform needs a radial grid")),
    };
    if psi.components != 1 {
        return Err(Error::usage("radial transform takes scalar fields"));
    }
    let peak = psi.data.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let edge = psi.data[n - (n / 20).max(1)..].iter().map(|v| v.norm()).fold(0.0, f64::max) / peak;
    if edge > 1e-8 {
        return Err(Error::Accuracy {
            message: "field has not decayed at the radial grid edge".into(),
            estimate: edge,
            tolerance: 1e-8,
        });
    }
    let u: Vec<Complex64> = (0..n).map(|j| psi.data[j] * (j as f64 * h)).collect();
    let s = dst1(&u);
    let dk = PI / (n as f64 * h);
    let smax = s.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let tail = s[n - (n / 20).max(1)..].iter().map(|v| v.norm()).fold(0.0, f64::max) / smax;
    let weighted: Vec<Complex64> = s.iter().enumerate().map(|(q, v)| v * m(q as f64 * dk)).collect();
    let back = dst1(&weighted);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let norm = 2.0 / n as f64;
    for j in 1..n {
        out[j] = back[j] * norm / (j as f64 * h);
    }
    // r → 0: u(r)/r → Σ_m k_m w_m (2/n).
    out[0] = weighted
        .iter()
        .enumerate()
        .map(|(q, v)| v * (q as f64 * dk))
        .sum::<Complex64>()
        * norm;
    Ok(RadialResult {
        field: Field::new(psi.grid, 1, out)?,
        error_estimate: edge.max(tail),
    })
}

/// ħc√(−Δ + μ²) on a radial function.
pub fn radial_apply_spectral(psi: &Field, params: &PhysicalParams) -> Result<RadialResult> {
    radial_apply_multiplier(psi, |k| c(symbol_k2(k * k, params), 0.0))
}

/// Heat semigroup exp(t(Δ − μ²)) on a periodic box, as a grid-backed semigroup handle.
#[derive(Debug, Clone)]
pub struct HeatSemigroup {
    pub grid: Grid,
    pub mu: f64,
}

impl HeatSemigroup {
    fn multiply(&self, v: &CVector, f: impl Fn(f64) -> Complex64) -> CVector {
        let field = Field::new(self.grid, 1, v.iter().copied().collect()).expect("vector matches grid");
        let out = apply_multiplier(&field, |k, _| f(dot(k, k))).expect("periodic grid");
        CVector::from_vec(out.data)
    }
}

impl Semigroup for HeatSemigroup {
    fn dimension(&self) -> usize {
        self.grid.len()
    }
    fn generator_apply(&self, v: &CVector) -> CVector {
        self.multiply(v, |k2| c(-(k2 + self.mu * self.mu), 0.0))
    }
    fn semigroup_apply(&self, t: f64, v: &CVector) -> CVector {
        self.multiply(v, |k2| c((-t * (k2 + self.mu * self.mu)).exp(), 0.0))
    }
    fn growth_bound(&self) -> (f64, f64) {
        (1.0, -self.mu * self.mu)
    }
    fn resolvent_direct(&self, lambda: Complex64, v: &CVector) -> Result<CVector> {
        Ok(self.multiply(v, |k2| 1.0 / (lambda + k2 + self.mu * self.mu)))
    }
}
