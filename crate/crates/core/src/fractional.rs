//! Strongly continuous semigroups, the one-half stable subordinator and the Balakrishnan
//! square root, exercised on matrix-backed generators.

use crate::error::{Error, Result};
use crate::linalg::{c, eigenvalues, hermitian_eigen, norm2, sqrtm, BranchRule, CMatrix, CVector};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use num_complex::Complex64;
use std::f64::consts::PI;

/// An evolution family T(t) with access to its generator A.
pub trait Semigroup {
    fn dimension(&self) -> usize;
    /// A v.
    fn generator_apply(&self, v: &CVector) -> CVector;
    /// T(t) v for t ≥ 0.
    fn semigroup_apply(&self, t: f64, v: &CVector) -> CVector;
    /// (M, β) with ‖T(t)‖ ≤ M e^{βt}.
    fn growth_bound(&self) -> (f64, f64);
    /// (λ − A)^{-1} v by a direct solve, when the backend can do it.
    fn resolvent_direct(&self, lambda: Complex64, v: &CVector) -> Result<CVector>;
    /// Spectrum of −A when available, for the Balakrishnan precondition.
    fn minus_generator_spectrum(&self) -> Option<Vec<Complex64>> {
        None
    }
}

/// T(t) = exp(tA) for a dense complex matrix A.
#[derive(Debug, Clone)]
pub struct MatrixSemigroup {
    pub generator: CMatrix,
    growth: (f64, f64),
}

impl MatrixSemigroup {
    pub fn new(generator: CMatrix) -> Result<Self> {
        if generator.nrows() != generator.ncols() || generator.nrows() == 0 {
            return Err(Error::usage("generator must be a nonempty square matrix"));
        }
        // Logarithmic norm: ‖e^{tA}‖ ≤ e^{t ω}, ω = λ_max((A + A*)/2).
        let (vals, _) = hermitian_eigen(&generator);
        let omega = *vals.last().unwrap();
        Ok(MatrixSemigroup {
            generator,
            growth: (1.0, omega),
        })
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0)));
        MatrixSemigroup::new(CMatrix::from_diagonal(&v))
    }
}

impl Semigroup for MatrixSemigroup {
    fn dimension(&self) -> usize {
        self.generator.nrows()
    }
    fn generator_apply(&self, v: &CVector) -> CVector {
        &self.generator * v
    }
    fn semigroup_apply(&self, t: f64, v: &CVector) -> CVector {
        if t == 0.0 {
            return v.clone();
        }
        (&self.generator * c(t, 0.0)).exp() * v
    }
    fn growth_bound(&self) -> (f64, f64) {
        self.growth
    }
    fn resolvent_direct(&self, lambda: Complex64, v: &CVector) -> Result<CVector> {
        let n = self.dimension();
        let m = CMatrix::identity(n, n) * lambda - &self.generator;
        m.lu()
            .solve(v)
            .ok_or_else(|| Error::numerical(format!("resolvent singular at λ = {lambda}")))
    }
    fn minus_generator_spectrum(&self) -> Option<Vec<Complex64>> {
        Some(eigenvalues(&(-&self.generator)))
    }
}

/// Vector result of a quadrature-based operator application.
#[derive(Debug, Clone)]
pub struct Applied {
    pub value: CVector,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_intervals: 20_000,
    }
}

/// One-half stable subordination density f_{t,1/2}(s) = t s^{-3/2} e^{-t²/4s} / √(4π).
pub fn subordination_density(t: f64, s: f64) -> Result<f64> {
    if !(t > 0.0) || !(s > 0.0) {
        return Err(Error::domain(format!("density needs t > 0 and s > 0 (t={t}, s={s})")));
    }
    Ok(density_unchecked(t, s))
}

fn density_unchecked(t: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    t * s.powf(-1.5) * (-t * t / (4.0 * s)).exp() / (4.0 * PI).sqrt()
}

/// Contour-deformed form (1/π)∫₀^∞ e^{-sr} sin(t√r) dr minus the closed-form density.
/// The substitution r = x² gives a Gaussian-damped integrand (2/π)∫ x e^{-s x²} sin(tx) dx.
pub fn density_bromwich_check(t: f64, s: f64) -> Result<f64> {
    let closed = subordination_density(t, s)?;
    let upper = (60.0 / s).sqrt();
    let r = integrate(
        |x: f64| x * (-s * x * x).exp() * (t * x).sin(),
        0.0,
        upper,
        QuadOptions {
            abs_tol: 1e-16,
            rel_tol: 1e-13,
            max_intervals: 4000,
        },
    )
    .map_err(|e| Error::numerical(format!("Bromwich quadrature failed for t={t}, s={s}: {e}")))?;
    Ok(2.0 / PI * r.value - closed)
}

/// T_{1/2}(t) v = ∫₀^∞ f_{t,1/2}(s) T(s) v ds.
pub fn subordinate_apply(sg: &dyn Semigroup, t: f64, v: &CVector) -> Result<Applied> {
    if t < 0.0 {
        return Err(Error::domain("subordination time must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(Applied {
            value: v.clone(),
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let mode = t * t / 6.0;
    let r = integrate_to_infinity(
        |s: f64| {
            let w = density_unchecked(t, s);
            if w == 0.0 {
                CVector::zeros(v.len())
            } else {
                sg.semigroup_apply(s, v) * c(w, 0.0)
            }
        },
        &[0.0, mode],
        opts(),
    )?;
    Ok(Applied {
        value: r.value,
        error_estimate: r.error,
        evaluations: r.evaluations,
    })
}

/// (−A)^{1/2} v = (1/π)∫₀^∞ λ^{-1/2} (λ − A)^{-1}(−Av) dλ, evaluated with λ = σ².
pub fn balakrishnan_sqrt_apply(sg: &dyn Semigroup, v: &CVector) -> Result<Applied> {
    if let Some(spec) = sg.minus_generator_spectrum() {
        if let Some(bad) = spec.iter().find(|l| l.re <= 0.0) {
            return Err(Error::domain(format!("−A is not positive definite (eigenvalue {bad})")));
        }
    }
    let w = -sg.generator_apply(v);
    let scale = (sg.generator_apply(v).norm() / v.norm().max(1e-300)).sqrt().max(1e-3);
    let mut failure = None;
    let r = integrate_to_infinity(
        |sigma: f64| match sg.resolvent_direct(c(sigma * sigma, 0.0), &w) {
            Ok(x) => x * c(2.0 / PI, 0.0),
            Err(e) => {
                failure.get_or_insert(e);
                CVector::zeros(w.len())
            }
        },
        &[0.0, scale],
        opts(),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Applied {
        value: r.value,
        error_estimate: r.error,
        evaluations: r.evaluations,
    })
}

/// Laplace-transform resolvent ∫₀^∞ e^{-λt} T(t) v dt with the A4 norm bound.
#[derive(Debug, Clone)]
pub struct ResolventReport {
    pub value: CVector,
    pub error_estimate: f64,
    /// M‖v‖ / (Re λ − β)
    pub norm_bound: f64,
    pub bound_satisfied: bool,
}

pub fn resolvent_from_semigroup(sg: &dyn Semigroup, lambda: Complex64, v: &CVector) -> Result<ResolventReport> {
    let (m, beta) = sg.growth_bound();
    if lambda.re <= beta {
        return Err(Error::domain(format!(
            "Re λ = {} must exceed the growth bound β = {beta}",
            lambda.re
        )));
    }
    let gap = lambda.re - beta;
    let r = integrate_to_infinity(
        |t: f64| sg.semigroup_apply(t, v) * (-lambda * t).exp(),
        &[0.0, 1.0 / gap],
        opts(),
    )?;
    let norm_bound = m * v.norm() / gap;
    let bound_satisfied = r.value.norm() <= norm_bound * (1.0 + 1e-9);
    Ok(ResolventReport {
        value: r.value,
        error_estimate: r.error,
        norm_bound,
        bound_satisfied,
    })
}

/// Generator of the subordinated semigroup, A_{1/2} = −(−A)^{1/2}.
pub fn half_generator(a: &CMatrix) -> Result<CMatrix> {
    Ok(-sqrtm(&(-a), BranchRule::NegativeAxis)?)
}

/// Sampled holomorphy constants |s|·‖(r + is − A_{1/2})^{-1}‖ for r > 0, s ≠ 0.
pub fn holomorphy_constants(a: &CMatrix, samples: &[(f64, f64)]) -> Result<Vec<f64>> {
    let ah = half_generator(a)?;
    let n = a.nrows();
    samples
        .iter()
        .map(|&(r, s)| {
            if !(r > 0.0) || s == 0.0 {
                return Err(Error::domain("holomorphy samples need r > 0 and s ≠ 0"));
            }
            let m = CMatrix::identity(n, n) * c(r, s) - &ah;
            let inv = m
                .try_inverse()
                .ok_or_else(|| Error::numerical("resolvent singular"))?;
            Ok(s.abs() * norm2(&inv))
        })
        .collect()
}
