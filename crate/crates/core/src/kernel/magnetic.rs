//! Constant magnetic field in the symmetric gauge a(y) = (e/2ħc) y × B.
//!
//! The off-diagonal kernel splits into the free kernel, a real term
//! (ħc/2π²) a(y)² μ²K₁(μr)/(μr), and an odd term −(ħc/π²) i μ³ (a(x)·z) K₂(μr)/(μr·r).
//! Because a(y)² is a polynomial and a(y)·z = a(x)·z, every piece is a convolution; the
//! odd term's principal value is the symmetric lattice sum plus its near-cell correction.
//! With a matrix mass the kernels are evaluated per eigenvalue of μ² on the corresponding
//! spectral projection.

use super::lattice::{convolve, covariant_gradient, lattice_apply_with, lattice_weights, LatticeWeights};
use super::mass::{mass_matrix, principal_sqrt, MassConstruction};
use super::{require_mass, LEVY_NORMALIZATION, ZETA_INV_R2};
use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::linalg::{c, CMatrix};
use crate::params::PhysicalParams;
use crate::special::bessel_k_complex_scaled_all;
use crate::spectral::dot;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Mass used by the constant-B operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassModel {
    /// μ² = m²c²/ħ² times the identity.
    Scalar,
    /// Matrix μ² from [`mass_matrix`] with the given construction.
    Matrix(MassConstruction),
}

/// Per-term fields of the constant-B application.
#[derive(Debug, Clone)]
pub struct MagneticBreakdown {
    /// Free kernel with the mass counterterm and near-cell correction.
    pub free: Field,
    /// a(y)² K₁ term.
    pub a_squared: Field,
    /// Odd (a·z) K₂ term.
    pub odd: Field,
    /// max |Re|, max |Im| of each term, in the order free, a_squared, odd.
    pub magnitudes: [(f64, f64); 3],
}

/// a(y) = (e/2ħc) y × B.
pub fn symmetric_gauge(y: [f64; 3], b: [f64; 3], params: &PhysicalParams) -> [f64; 3] {
    let k = 0.5 * params.e / params.hbar_c();
    [
        k * (y[1] * b[2] - y[2] * b[1]),
        k * (y[2] * b[0] - y[0] * b[2]),
        k * (y[0] * b[1] - y[1] * b[0]),
    ]
}

/// Offset-kernel weights h³ g(z) on the zero-padded open grid, g(0) = 0.
fn open_weights(grid: &Grid, g: impl Fn([f64; 3], f64) -> Complex64) -> LatticeWeights {
    let dims = grid.dims3().expect("3D grid");
    let h = grid.spacing();
    let padded = [2 * dims[0], 2 * dims[1], 2 * dims[2]];
    let signed = |i: usize, n: usize| if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
    let mut w = vec![Complex64::new(0.0, 0.0); padded[0] * padded[1] * padded[2]];
    for i in 0..padded[0] {
        for j in 0..padded[1] {
            for k in 0..padded[2] {
                let d = [signed(i, padded[0]), signed(j, padded[1]), signed(k, padded[2])];
                let inside = d.iter().zip(&dims).all(|(&x, &n)| x.unsigned_abs() < n as u64);
                if !inside || d == [0, 0, 0] {
                    continue;
                }
                let z = [d[0] as f64 * h, d[1] as f64 * h, d[2] as f64 * h];
                w[(i * padded[1] + j) * padded[2] + k] = g(z, dot(z, z).sqrt()) * (h * h * h);
            }
        }
    }
    LatticeWeights {
        dims,
        weights: w,
        padded,
        diagonal: Complex64::new(0.0, 0.0),
        periodic: false,
    }
}

struct MassBranch {
    mu: Complex64,
    projector: CMatrix,
}

fn branches(b: [f64; 3], params: &PhysicalParams, model: MassModel) -> Result<Vec<MassBranch>> {
    match model {
        MassModel::Scalar => Ok(vec![MassBranch {
            mu: c(require_mass(params)?, 0.0),
            projector: CMatrix::identity(4, 4),
        }]),
        MassModel::Matrix(construction) => {
            let mm = mass_matrix(b, params, construction)?;
            let d = mm.decompose()?;
            d.eigenvalues
                .iter()
                .zip(&d.projections)
                .map(|(l, p)| {
                    let mu = principal_sqrt(*l);
                    if mu.re <= 0.0 {
                        return Err(Error::domain(format!("mass eigenvalue {l} gives no decaying kernel")));
                    }
                    Ok(MassBranch {
                        mu,
                        projector: p.clone(),
                    })
                })
                .collect()
        }
    }
}

/// Constant-B square-root operator on a 4-component field (or a scalar field with the scalar
/// mass model) on an open 3D grid.
pub fn apply_constant_b(psi: &Field, b: [f64; 3], params: &PhysicalParams, model: MassModel) -> Result<(Field, MagneticBreakdown)> {
    params.validate()?;
    let dims = match psi.grid {
        Grid::Open3d { dims, .. } => dims,
        _ => return Err(Error::usage("the symmetric gauge is not periodic; use an open 3D grid")),
    };
    if psi.components != 4 && !(psi.components == 1 && model == MassModel::Scalar) {
        return Err(Error::usage("matrix mass needs a 4-component field"));
    }
    let h = psi.grid.spacing();
    let hc = params.hbar_c();
    let npts = psi.grid.len();
    let ncomp = psi.components;
    let a_at: Vec<[f64; 3]> = (0..npts).map(|i| symmetric_gauge(psi.grid.position(i), b, params)).collect();
    let a2: Vec<f64> = a_at.iter().map(|a| dot(*a, *a)).collect();
    let mut free = Field::zeros(psi.grid, ncomp);
    let mut a_sq = Field::zeros(psi.grid, ncomp);
    let mut odd = Field::zeros(psi.grid, ncomp);
    for br in branches(b, params, model)? {
        let mu = br.mu;
        // Projected field P ψ.
        let mut proj = psi.clone();
        if ncomp == 4 {
            for p in 0..npts {
                let v = nalgebra::DVector::from_iterator(4, (0..4).map(|k| psi.data[4 * p + k]));
                let pv = &br.projector * v;
                for k in 0..4 {
                    proj.data[4 * p + k] = pv[k];
                }
            }
        }
        let lw = lattice_weights(&psi.grid, mu, [0.0; 3])?;
        let k1w = open_weights(&psi.grid, |_, r| {
            let u = mu * r;
            let k = bessel_k_complex_scaled_all(u).expect("Re μ > 0") [1] * (-u).exp();
            mu * mu * k / u * LEVY_NORMALIZATION
        });
        let oddw: [LatticeWeights; 3] = [0, 1, 2].map(|j| {
            open_weights(&psi.grid, |z, r| {
                let u = mu * r;
                let k = bessel_k_complex_scaled_all(u).expect("Re μ > 0")[2] * (-u).exp();
                c(0.0, -2.0) * mu * mu * mu * z[j] * k / (u * r) * LEVY_NORMALIZATION
            })
        });
        for comp in 0..ncomp {
            let data = proj.component(comp).data;
            let f = lattice_apply_with(&data, &psi.grid, &lw, mu, [0.0; 3], hc).total();
            let weighted: Vec<Complex64> = data.iter().zip(&a2).map(|(p, w)| p * *w).collect();
            let s2 = convolve(&weighted, &k1w);
            let grad = covariant_gradient(&data, dims, h, [0.0; 3], false);
            let sj: Vec<Vec<Complex64>> = oddw.iter().map(|w| convolve(&data, w)).collect();
            for p in 0..npts {
                let corr2 = h * ZETA_INV_R2 * LEVY_NORMALIZATION * a2[p] * data[p];
                let adotgrad = (0..3).map(|j| grad[j][p] * a_at[p][j]).sum::<Complex64>();
                let corr_odd = c(0.0, 2.0 * h * ZETA_INV_R2 / (3.0 * PI * PI)) * adotgrad;
                let odd_sum = (0..3).map(|j| sj[j][p] * a_at[p][j]).sum::<Complex64>();
                free.data[p * ncomp + comp] += f[p];
                a_sq.data[p * ncomp + comp] += (s2[p] - corr2) * hc;
                odd.data[p * ncomp + comp] += (odd_sum - corr_odd) * hc;
            }
        }
    }
    let mag = |f: &Field| {
        f.data.iter().fold((0.0f64, 0.0f64), |(r, i), v| (r.max(v.re.abs()), i.max(v.im.abs())))
    };
    let magnitudes = [mag(&free), mag(&a_sq), mag(&odd)];
    let mut total = free.clone();
    for p in 0..total.data.len() {
        total.data[p] += a_sq.data[p] + odd.data[p];
    }
    Ok((
        total,
        MagneticBreakdown {
            free,
            a_squared: a_sq,
            odd,
            magnitudes,
        },
    ))
}
