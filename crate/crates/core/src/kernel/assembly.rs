//! Direct assembly of the kernel for position-dependent mass μ(y) and vector potential a(y).
//!
//! With u = μ(y)r, w = μ(y)² e^{iā·z}, z = x − y and (ħc/2π²) overall, the off-diagonal
//! kernel acting on ψ(y) is the sum of
//!
//! ```text
//! T1 = (μ² + a² − i∇·a) w K₁/u        T5 = −Δw K₁/u
//! T3 = −2i (a·∇w) K₁/u                T6 = −w (∇u)² (K₃/u − K₂/u²)
//! T4 = 2i w (a·∇u) K₂/u               T7 = w Δu K₂/u
//! T8 = 2 (∇w·∇u) K₂/u
//! ```
//!
//! (derivatives in y) with closed forms
//! ∇u = r∇μ − μz/r, (∇u)² = μ² + r²|∇μ|² − 2μ∇μ·z, Δu = rΔμ − 2(∇μ·z − μ)/r,
//! ∇w = w(2∇μ/μ − iā), Δw = w[2Δμ/μ + 2|∇μ|²/μ² − 4iā·∇μ/μ − ā²].
//! The diagonal (T2) is the lattice total weight at μ(x); near-cell corrections use frozen
//! coefficients at x and are exact to O(h³) when μ is constant. Field derivatives are
//! second-order finite differences, exact for affine fields.

use super::lattice::{covariant_gradient, covariant_second_fourth, lattice_total_weight};
use super::{LEVY_NORMALIZATION, ZETA_INV_R2};
use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::linalg::c;
use crate::params::PhysicalParams;
use crate::special::bessel_k_scaled_all;
use crate::spectral::dot;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Coefficient fields sampled on the grid of ψ.
#[derive(Debug, Clone)]
pub struct AssemblyInput {
    pub grid: Grid,
    /// μ(y) in inverse length, positive.
    pub mu: Vec<f64>,
    /// a(y) = eA(y)/ħc.
    pub a: Vec<[f64; 3]>,
    /// Constant phase wavevector ā.
    pub a_bar: [f64; 3],
}

impl AssemblyInput {
    pub fn from_fn(grid: Grid, mu: impl Fn([f64; 3]) -> f64, a: impl Fn([f64; 3]) -> [f64; 3], a_bar: [f64; 3]) -> Self {
        let pos: Vec<[f64; 3]> = (0..grid.len()).map(|i| grid.position(i)).collect();
        AssemblyInput {
            grid,
            mu: pos.iter().map(|&p| mu(p)).collect(),
            a: pos.iter().map(|&p| a(p)).collect(),
            a_bar,
        }
    }

    /// From a scalar μ field and three scalar fields for the components of a.
    pub fn from_fields(mu_field: &Field, a_field: &[Field; 3], a_bar: [f64; 3]) -> Result<Self> {
        let grid = mu_field.grid;
        if mu_field.components != 1 || a_field.iter().any(|f| f.grid != grid || f.components != 1) {
            return Err(Error::usage("μ and the components of a must be scalar fields on one grid"));
        }
        let real = |f: &Field| -> Result<Vec<f64>> {
            f.data
                .iter()
                .map(|v| {
                    if v.im != 0.0 {
                        Err(Error::domain("coefficient fields must be real"))
                    } else {
                        Ok(v.re)
                    }
                })
                .collect()
        };
        let mu = real(mu_field)?;
        let ax = real(&a_field[0])?;
        let ay = real(&a_field[1])?;
        let az = real(&a_field[2])?;
        Ok(AssemblyInput {
            grid,
            mu,
            a: (0..grid.len()).map(|i| [ax[i], ay[i], az[i]]).collect(),
            a_bar,
        })
    }
}

/// One assembled contribution, already multiplied by ħc.
#[derive(Debug, Clone)]
pub struct TermEntry {
    pub name: &'static str,
    pub values: Vec<Complex64>,
    pub max_re: f64,
    pub max_im: f64,
}

/// Per-term contributions; their sum is the returned field.
#[derive(Debug, Clone)]
pub struct TermLedger {
    pub terms: Vec<TermEntry>,
}

impl TermLedger {
    pub fn get(&self, name: &str) -> Option<&TermEntry> {
        self.terms.iter().find(|t| t.name == name)
    }
}

pub const TERM_NAMES: [&str; 10] = [
    "T1_mass_potential_K1",
    "T2_diagonal",
    "T3_a_grad_w_K1",
    "T4_a_grad_u_K2",
    "T5_lap_w_K1",
    "T6_K3",
    "T7_lap_u_K2",
    "T8_grad_w_grad_u_K2",
    "mass_counterterm",
    "near_cell_correction",
];

/// Central differences inside, second-order one-sided at the faces.
fn derivatives(f: &[f64], dims: [usize; 3], h: f64) -> (Vec<[f64; 3]>, Vec<f64>) {
    let idx = |p: [usize; 3]| (p[0] * dims[1] + p[1]) * dims[2] + p[2];
    let mut grad = vec![[0.0; 3]; f.len()];
    let mut lap = vec![0.0; f.len()];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let p = [i, j, k];
                let here = idx(p);
                for ax in 0..3 {
                    let n = dims[ax];
                    let at = |o: usize| {
                        let mut q = p;
                        q[ax] = o;
                        f[idx(q)]
                    };
                    let m = p[ax];
                    let (d1, d2) = if n < 3 {
                        (0.0, 0.0)
                    } else if m == 0 {
                        ((-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h), (at(0) - 2.0 * at(1) + at(2)) / (h * h))
                    } else if m == n - 1 {
                        (
                            (3.0 * at(m) - 4.0 * at(m - 1) + at(m - 2)) / (2.0 * h),
                            (at(m) - 2.0 * at(m - 1) + at(m - 2)) / (h * h),
                        )
                    } else {
                        ((at(m + 1) - at(m - 1)) / (2.0 * h), (at(m + 1) - 2.0 * at(m) + at(m - 1)) / (h * h))
                    };
                    grad[here][ax] = d1;
                    lap[here] += d2;
                }
            }
        }
    }
    (grad, lap)
}

struct Coeffs {
    mu: f64,
    gmu: [f64; 3],
    lmu: f64,
    a: [f64; 3],
    div_a: f64,
}

fn cadd(a: [Complex64; 3], b: [Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The seven off-diagonal kernel terms at offset z = x − y, per unit ħc h³/(2π²).
fn kernel_terms(cf: &Coeffs, a_bar: [f64; 3], z: [f64; 3], r: f64) -> [Complex64; 7] {
    let mu = cf.mu;
    let u = mu * r;
    let ks = bessel_k_scaled_all(u).expect("u > 0");
    let e = (-u).exp();
    let (k1, k2, k3) = (ks[1] * e / u, ks[2] * e / u, ks[3] * e / u);
    let k2u2 = k2 / u;
    let w = c(0.0, dot(a_bar, z)).exp() * (mu * mu);
    let gz = dot(cf.gmu, z);
    let g2 = dot(cf.gmu, cf.gmu);
    let grad_u = [0, 1, 2].map(|i| r * cf.gmu[i] - mu * z[i] / r);
    let grad_u2 = mu * mu + r * r * g2 - 2.0 * mu * gz;
    let lap_u = r * cf.lmu - 2.0 * (gz - mu) / r;
    let grad_w = [0, 1, 2].map(|i| w * c(2.0 * cf.gmu[i] / mu, -a_bar[i]));
    let lap_w = w
        * c(
            2.0 * cf.lmu / mu + 2.0 * g2 / (mu * mu) - dot(a_bar, a_bar),
            -4.0 * dot(a_bar, cf.gmu) / mu,
        );
    let ac = cf.a.map(|v| c(v, 0.0));
    let guc = grad_u.map(|v| c(v, 0.0));
    [
        c(mu * mu + dot(cf.a, cf.a), -cf.div_a) * w * k1,
        c(0.0, -2.0) * cadd(ac, grad_w) * k1,
        c(0.0, 2.0) * w * dot(cf.a, grad_u) * k2,
        -lap_w * k1,
        -w * grad_u2 * (k3 - k2u2),
        w * lap_u * k2,
        cadd(grad_w, guc) * (2.0 * k2),
    ]
}

/// Assemble the operator on a scalar field over an open 3D grid by direct pair summation.
pub fn general_assembly(input: &AssemblyInput, psi: &Field, params: &PhysicalParams) -> Result<(Field, TermLedger)> {
    params.validate()?;
    let dims = match psi.grid {
        Grid::Open3d { dims, .. } => dims,
        _ => return Err(Error::usage("general assembly runs on open 3D grids")),
    };
    if input.grid != psi.grid || psi.components != 1 {
        return Err(Error::usage("ψ must be a scalar field on the coefficient grid"));
    }
    if input.mu.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::domain("μ must be positive everywhere"));
    }
    let grid = psi.grid;
    let h = grid.spacing();
    let n = grid.len();
    let hc = params.hbar_c();
    let (gmu, lmu) = derivatives(&input.mu, dims, h);
    let mut div_a = vec![0.0; n];
    for ax in 0..3 {
        let comp: Vec<f64> = input.a.iter().map(|v| v[ax]).collect();
        let (g, _) = derivatives(&comp, dims, h);
        for p in 0..n {
            div_a[p] += g[p][ax];
        }
    }
    let coeffs: Vec<Coeffs> = (0..n)
        .map(|p| Coeffs {
            mu: input.mu[p],
            gmu: gmu[p],
            lmu: lmu[p],
            a: input.a[p],
            div_a: div_a[p],
        })
        .collect();
    let pos: Vec<[f64; 3]> = (0..n).map(|p| grid.position(p)).collect();
    let scale = hc * h * h * h * LEVY_NORMALIZATION;
    let a_bar = input.a_bar;
    let offdiag: Vec<[Complex64; 7]> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = [c(0.0, 0.0); 7];
            for y in 0..n {
                if y == x || psi.data[y] == c(0.0, 0.0) {
                    continue;
                }
                let z = [pos[x][0] - pos[y][0], pos[x][1] - pos[y][1], pos[x][2] - pos[y][2]];
                let r = dot(z, z).sqrt();
                let t = kernel_terms(&coeffs[y], a_bar, z, r);
                for (s, v) in acc.iter_mut().zip(t) {
                    *s += v * psi.data[y];
                }
            }
            acc.map(|v| v * scale)
        })
        .collect();

    let mut totals: HashMap<u64, Complex64> = HashMap::new();
    let mut diagonal = vec![c(0.0, 0.0); n];
    for p in 0..n {
        let m = input.mu[p];
        let w = match totals.get(&m.to_bits()) {
            Some(w) => *w,
            None => {
                let w = lattice_total_weight(c(m, 0.0), h)?;
                totals.insert(m.to_bits(), w);
                w
            }
        };
        diagonal[p] = w * psi.data[p] * hc;
    }
    let counter: Vec<Complex64> = (0..n).map(|p| psi.data[p] * (input.mu[p] * hc)).collect();

    // Frozen-coefficient near-cell corrections, D = ∇ − iā.
    let (minus_d2, quartic) = covariant_second_fourth(&psi.data, dims, h, a_bar, false);
    let dpsi = covariant_gradient(&psi.data, dims, h, a_bar, false);
    let c2 = h * ZETA_INV_R2 / (6.0 * PI * PI);
    let c4 = h * h * h / (24.0 * PI * PI);
    let correction: Vec<Complex64> = (0..n)
        .map(|p| {
            let m2 = input.mu[p] * input.mu[p];
            let free = minus_d2[p] * (c2 + c4 * m2) - quartic[p] * c4;
            let b = [0, 1, 2].map(|i| input.a[p][i] - a_bar[i]);
            let bd = (0..3).map(|i| dpsi[i][p] * b[i]).sum::<Complex64>();
            let pot = psi.data[p] * (h * ZETA_INV_R2 * LEVY_NORMALIZATION * dot(b, b))
                + bd * c(0.0, 2.0 * h * ZETA_INV_R2 / (3.0 * PI * PI))
                + psi.data[p] * c(0.0, h * ZETA_INV_R2 * div_a[p] / (6.0 * PI * PI));
            -(free + pot) * hc
        })
        .collect();

    let mut columns: Vec<Vec<Complex64>> = (0..7).map(|t| offdiag.iter().map(|v| v[t]).collect()).collect();
    columns.insert(1, diagonal);
    columns.push(counter);
    columns.push(correction);
    let total: Vec<Complex64> = (0..n).map(|p| columns.iter().map(|col| col[p]).sum()).collect();
    let terms = TERM_NAMES
        .iter()
        .zip(columns)
        .map(|(name, values)| {
            let (max_re, max_im) = values
                .iter()
                .fold((0.0f64, 0.0f64), |(r, i), v| (r.max(v.re.abs()), i.max(v.im.abs())));
            TermEntry {
                name,
                values,
                max_re,
                max_im,
            }
        })
        .collect();
    Ok((Field::new(grid, 1, total)?, TermLedger { terms }))
}
