//! The 4×4 matrix mass μ² in a constant magnetic field, and its polar factors.

use crate::error::{Error, Result};
use crate::linalg::{c, fro, hermitian_eigen, spectral_decompose, CMatrix, CVector, SpectralDecomposition};
use crate::params::PhysicalParams;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which formula builds μ².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassConstruction {
    /// The block matrix exactly as printed: diagonal blocks (m²c²/ħ² ∓ eB₃/ħc)I₂ and
    /// off-diagonal blocks ±(ie/ħc)(B₂ − iB₁)I₂. Not Hermitian for transverse B.
    VerbatimBlock,
    /// (m²c²/ħ²)I₄ − (e/ħc) diag(σ·B, σ·B), Hermitian.
    HermitianSigmaB,
}

impl MassConstruction {
    pub fn label(&self) -> &'static str {
        match self {
            MassConstruction::VerbatimBlock => "verbatim-block",
            MassConstruction::HermitianSigmaB => "hermitian-sigma-b",
        }
    }
}

/// μ² with its spectral data.
#[derive(Debug, Clone)]
pub struct MassMatrix {
    pub mu_squared: CMatrix,
    pub construction: MassConstruction,
    pub b: [f64; 3],
    /// Eigenvalues of μ² (with multiplicity), sorted by real part (to 1e-9), then imaginary part.
    pub eigenvalues: Vec<Complex64>,
}

/// Pauli matrices.
pub fn pauli() -> [CMatrix; 3] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

pub fn mass_matrix(b: [f64; 3], params: &PhysicalParams, construction: MassConstruction) -> Result<MassMatrix> {
    params.validate()?;
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("magnetic field must be finite"));
    }
    let m2 = params.mu().powi(2);
    let k = params.e / params.hbar_c();
    let mut mu2 = CMatrix::zeros(4, 4);
    match construction {
        MassConstruction::VerbatimBlock => {
            let off = c(0.0, k) * c(b[1], -b[0]);
            for d in 0..2 {
                mu2[(d, d)] = c(m2 - k * b[2], 0.0);
                mu2[(d + 2, d + 2)] = c(m2 + k * b[2], 0.0);
                mu2[(d, d + 2)] = off;
                mu2[(d + 2, d)] = -off;
            }
        }
        MassConstruction::HermitianSigmaB => {
            let s = pauli();
            let sb = &s[0] * c(b[0], 0.0) + &s[1] * c(b[1], 0.0) + &s[2] * c(b[2], 0.0);
            for blk in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let id = if i == j { m2 } else { 0.0 };
                        mu2[(2 * blk + i, 2 * blk + j)] = c(id, 0.0) - sb[(i, j)] * k;
                    }
                }
            }
        }
    }
    let mut eigenvalues = crate::linalg::eigenvalues(&mu2);
    eigenvalues.sort_by(|x, y| {
        let key = |z: &Complex64| (z.re * 1e9).round();
        key(x).total_cmp(&key(y)).then(x.im.total_cmp(&y.im))
    });
    Ok(MassMatrix {
        mu_squared: mu2,
        construction,
        b,
        eigenvalues,
    })
}

impl MassMatrix {
    /// Spectral decomposition of μ² (fails for defective matrices).
    pub fn decompose(&self) -> Result<SpectralDecomposition> {
        spectral_decompose(&self.mu_squared, 1e-10)
    }

    /// Principal square root μ, eigenvalue arguments halved from (−π, π].
    pub fn mu(&self) -> Result<CMatrix> {
        let d = self.decompose()?;
        Ok(d.apply(principal_sqrt))
    }
}

/// √z with arg z ∈ (−π, π], so arg √z ∈ (−π/2, π/2].
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let mut arg = z.arg();
    if arg <= -PI {
        arg += 2.0 * PI;
    }
    Complex64::from_polar(z.norm().sqrt(), arg / 2.0)
}

/// μ = U|μ| with |μ| = (μ*μ)^{1/2}.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub u: CMatrix,
    pub abs_mu: CMatrix,
    /// ‖μ − U|μ|‖_F
    pub residual: f64,
    /// ‖U*U − P‖_F with P the projector onto the range of |μ|.
    pub isometry_defect: f64,
}

/// Polar factors of μ = √(μ²).
pub fn polar_decompose(mm: &MassMatrix) -> Result<PolarFactors> {
    polar_decompose_matrix(&mm.mu()?)
}

/// Polar factors of an arbitrary square matrix, with U acting as zero on ker |μ|.
pub fn polar_decompose_matrix(mu: &CMatrix) -> Result<PolarFactors> {
    let n = mu.nrows();
    let (vals, vecs) = hermitian_eigen(&(mu.adjoint() * mu));
    let scale = vals.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let sv: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let diag_abs = CVector::from_iterator(n, sv.iter().map(|&s| c(s, 0.0)));
    let inv = CVector::from_iterator(
        n,
        vals.iter()
            .zip(&sv)
            .map(|(&v, &s)| if v > 1e-24 * scale { c(1.0 / s, 0.0) } else { c(0.0, 0.0) }),
    );
    let proj = CVector::from_iterator(
        n,
        vals.iter().map(|&v| if v > 1e-24 * scale { c(1.0, 0.0) } else { c(0.0, 0.0) }),
    );
    let abs_mu = &vecs * CMatrix::from_diagonal(&diag_abs) * vecs.adjoint();
    let abs_inv = &vecs * CMatrix::from_diagonal(&inv) * vecs.adjoint();
    let p = &vecs * CMatrix::from_diagonal(&proj) * vecs.adjoint();
    let u = mu * abs_inv;
    let residual = fro(&(mu - &u * &abs_mu));
    let isometry_defect = fro(&(u.adjoint() * &u - p));
    Ok(PolarFactors {
        u,
        abs_mu,
        residual,
        isometry_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longitudinal_field_diagonal() {
        let p = PhysicalParams::natural();
        let m = mass_matrix([0.0, 0.0, 0.5], &p, MassConstruction::VerbatimBlock).unwrap();
        let want = [0.5, 0.5, 1.5, 1.5];
        for i in 0..4 {
            for j in 0..4 {
                let w = if i == j { want[i] } else { 0.0 };
                assert!((m.mu_squared[(i, j)] - c(w, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn transverse_field_complex_pairs() {
        let p = PhysicalParams::natural();
        let m = mass_matrix([0.5, 0.0, 0.0], &p, MassConstruction::VerbatimBlock).unwrap();
        let want = [c(1.0, -0.5), c(1.0, -0.5), c(1.0, 0.5), c(1.0, 0.5)];
        for (g, w) in m.eigenvalues.iter().zip(want) {
            assert!((g - w).norm() < 1e-12, "{g} vs {w}");
        }
    }
}
