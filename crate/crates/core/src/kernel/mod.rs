//! Kernel representations of ħc√(−(∇ − ia)² + μ²).
//!
//! The free operator is realised as the Lévy-type singular integral
//!
//! ```text
//! ħc ∫ [ψ(x) − ψ(y)] ν(|x − y|) dy + mc² ψ(x),   ν(r) = μ² K₂(μr) / (2π² r²)
//! ```
//!
//! whose symbol is exactly ħc[√(k² + μ²) − μ] + mc². The normalisation 1/(2π²) is fixed by
//! that symbol condition (see [`LEVY_NORMALIZATION`]).

pub mod assembly;
pub mod identities;
pub mod lattice;
pub mod magnetic;
pub mod mass;
pub mod profile;
pub mod radial;

pub use assembly::{general_assembly, AssemblyInput, TermEntry, TermLedger};
pub use identities::{resolvent_kernel_identity, spectral_density_identity, IdentityCheck};
pub use lattice::{apply_constant_a, apply_free_lattice, imaginary_term_limit};
pub use magnetic::{apply_constant_b, symmetric_gauge, MagneticBreakdown, MassModel};
pub use mass::{mass_matrix, polar_decompose, polar_decompose_matrix, MassConstruction, MassMatrix, PolarFactors};
pub use profile::{free_effective_kernel, free_profile, KernelProfile, Regime};
pub use radial::apply_free_radial;

use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::params::PhysicalParams;
use crate::special::{bessel_k_complex_scaled_all, bessel_k_scaled_all};
use num_complex::Complex64;
use std::f64::consts::PI;

/// σ/(ħc μ²): the Lévy density is ν(r) = LEVY_NORMALIZATION · μ² K₂(μr)/r².
///
/// Fixed by ∫(1 − cos k·y) ν(|y|) dy = √(k² + μ²) − μ; the integration test
/// `levy_normalization` re-derives it by quadrature. A kernel prefactor of 2/π² (four
/// times larger) would break the symbol.
pub const LEVY_NORMALIZATION: f64 = 1.0 / (2.0 * PI * PI);

/// Regularised lattice sums over ℤ³∖{0} (analytic continuation of Σ' g(n) − ∫ g):
/// g = |n|⁻², g = n₁⁴/|n|⁴, g = n₁²n₂²/|n|⁴. Re-derived in the `lattice_constants` test.
pub const ZETA_INV_R2: f64 = -8.913_632_917_585;
pub const ZETA_X4: f64 = 0.171_599_025_185;
pub const ZETA_X2Y2: f64 = -0.252_466_179_256;

/// ν(r)/ħc for real μ ≥ 0, including the massless limit 1/(π² r⁴).
pub fn levy_density(mu: f64, r: f64) -> f64 {
    if mu == 0.0 {
        return 1.0 / (PI * PI * r.powi(4));
    }
    let u = mu * r;
    let k2 = bessel_k_scaled_all(u).expect("positive argument")[2] * (-u).exp();
    LEVY_NORMALIZATION * mu * mu * k2 / (r * r)
}

/// ν(r)/ħc for complex μ with Re μ > 0 (matrix-mass eigenvalues).
pub fn levy_density_complex(mu: Complex64, r: f64) -> Complex64 {
    if mu.im == 0.0 {
        return Complex64::new(levy_density(mu.re, r), 0.0);
    }
    let u = mu * r;
    let k = bessel_k_complex_scaled_all(u).expect("Re μ ≥ 0 and r > 0")[2] * (-u).exp();
    mu * mu * k * LEVY_NORMALIZATION / (r * r)
}

/// ħc√(−Δ + μ²) ψ by the singular-integral kernel. Radial grids use spherical means;
/// 3D grids use the corrected lattice sum.
pub fn apply_free(psi: &Field, params: &PhysicalParams) -> Result<Field> {
    params.validate()?;
    match psi.grid {
        Grid::Radial { .. } => Ok(apply_free_radial(psi, params)?.field),
        _ => apply_free_lattice(psi, params),
    }
}

fn require_mass(params: &PhysicalParams) -> Result<f64> {
    let mu = params.mu();
    if mu <= 0.0 {
        return Err(Error::domain("3D lattice kernels need μ > 0 (finite Compton length)"));
    }
    Ok(mu)
}
