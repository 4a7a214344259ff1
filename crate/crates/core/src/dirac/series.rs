//! √(G + F) as √G Σ binom(1/2, n)(G⁻¹F)ⁿ, and the split of the squared operator into a
//! constant-magnetic-field part G and a remainder F.

use super::check::{principal_sqrtm, MAX_DENSE_DIM};
use super::{
    derivative_operator, diag, kron, sigma_term, CrossMomentum, DiracMatrices, Derivatives, Representation,
};
use crate::error::{Error, Result};
use crate::linalg::{c, fro, hermitian_eigen, norm2, sqrtm, BranchRule, CMatrix, CVector};
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Evaluate even when ‖G⁻¹F‖ ≥ 1 (the result is flagged as divergent).
    pub allow_divergent: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { allow_divergent: false }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PerturbationOrder {
    pub order: usize,
    /// ‖√G binom(1/2, n)(G⁻¹F)ⁿ‖_F
    pub term_norm: f64,
    /// ‖S_n − √(G+F)‖_F/‖√(G+F)‖_F (dense reference)
    pub error_vs_exact: Option<f64>,
    /// ‖S_n − √G√(I + G⁻¹F)‖_F/‖·‖_F: distance to what the series sums to.
    pub error_vs_limit: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PerturbationResult {
    pub approximation: CMatrix,
    pub ledger: Vec<PerturbationOrder>,
    /// ‖G⁻¹F‖₂
    pub g_inv_f: f64,
    /// ‖G^{-1/2} F G^{-1/2}‖₂
    pub g_half_f_g_half: f64,
    /// ‖[G, F]‖_F/(‖G‖_F‖F‖_F); the series sums to √(G+F) only when this vanishes.
    pub commutator: f64,
    pub divergent: bool,
}

impl PerturbationResult {
    /// error_{n+1}/error_n against the series limit, for consecutive orders.
    pub fn decay_ratios(&self) -> Vec<f64> {
        self.ledger
            .windows(2)
            .filter_map(|w| Some(w[1].error_vs_limit? / w[0].error_vs_limit?))
            .collect()
    }
}

/// binom(1/2, n)
pub fn binom_half(n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (0.5 - k as f64) / (k as f64 + 1.0))
}

/// √G Σ_{n=0}^{order} binom(1/2, n)(G⁻¹F)ⁿ with a per-order error ledger.
pub fn perturbation_series(g: &CMatrix, f: &CMatrix, order: usize, opts: SeriesOptions) -> Result<PerturbationResult> {
    let dim = g.nrows();
    if g.shape() != (dim, dim) || f.shape() != (dim, dim) || dim == 0 {
        return Err(Error::usage("G and F must be square matrices of equal size"));
    }
    if dim > MAX_DENSE_DIM {
        return Err(Error::usage(format!("matrix size {dim} exceeds {MAX_DENSE_DIM}")));
    }
    let gscale = fro(g).max(f64::MIN_POSITIVE);
    if fro(&(g - g.adjoint())) > 1e-12 * gscale {
        return Err(Error::domain("G must be Hermitian"));
    }
    let (vals, vecs) = hermitian_eigen(g);
    if vals[0] <= 0.0 {
        return Err(Error::domain(format!("G is not positive definite (λ_min = {:.3e})", vals[0])));
    }
    let fun = |h: fn(f64) -> f64| {
        let d = CVector::from_iterator(dim, vals.iter().map(|&l| c(h(l), 0.0)));
        &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
    };
    let sqrt_g = fun(f64::sqrt);
    let g_inv = fun(|l| 1.0 / l);
    let g_mhalf = fun(|l| 1.0 / l.sqrt());
    let x = &g_inv * f;
    let g_inv_f = norm2(&x);
    let divergent = g_inv_f >= 1.0;
    if divergent && !opts.allow_divergent {
        return Err(Error::numerical(format!(
            "‖G⁻¹F‖ = {g_inv_f:.3} ≥ 1: the series diverges (pass allow_divergent to evaluate anyway)"
        )));
    }
    let g_half_f_g_half = norm2(&(&g_mhalf * f * &g_mhalf));
    let commutator = fro(&(g * f - f * g)) / (gscale * fro(f).max(f64::MIN_POSITIVE));

    let exact = principal_sqrtm(&(g + f)).ok().map(|(m, _)| m);
    let id = CMatrix::identity(dim, dim);
    let limit = sqrtm(&(&id + &x), BranchRule::NonpositiveReal).ok().map(|r| &sqrt_g * r);
    let rel = |s: &CMatrix, r: &Option<CMatrix>| r.as_ref().map(|r| fro(&(s - r)) / fro(r).max(f64::MIN_POSITIVE));

    let mut power = id.clone();
    let mut sum = CMatrix::zeros(dim, dim);
    let mut ledger = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n > 0 {
            power = &power * &x;
        }
        let term = &sqrt_g * &power * c(binom_half(n), 0.0);
        sum += &term;
        ledger.push(PerturbationOrder {
            order: n,
            term_norm: fro(&term),
            error_vs_exact: rel(&sum, &exact),
            error_vs_limit: rel(&sum, &limit),
        });
    }
    Ok(PerturbationResult {
        approximation: sum,
        ledger,
        g_inv_f,
        g_half_f_g_half,
        commutator,
        divergent,
    })
}

/// A = A₁ + A₂ with A₁ the potential of a constant field B₁, plus V and optional
/// frozen time derivatives.
#[derive(Debug, Clone)]
pub struct PotentialInput {
    pub representation: Representation,
    /// Constant field. On a lattice along x it must have B₁ₓ = 0 (A₁ = (0, B_z x, −B_y x));
    /// a plane wave only admits B₁ = 0.
    pub b1: [f64; 3],
    pub a2: Vec<[f64; 3]>,
    pub v: Vec<f64>,
    pub dv_dt: Option<Vec<f64>>,
    pub da2_dt: Option<Vec<[f64; 3]>>,
    pub params: PhysicalParams,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecompositionOptions {
    pub cross: CrossMomentum,
    pub derivatives: Derivatives,
}

#[derive(Debug, Clone)]
pub struct PotentialDecomposition {
    /// A₁ per site.
    pub a1: Vec<[f64; 3]>,
    /// c²(p − eA₁/c)² + m²c⁴ − eħcΣ·B₁
    pub g: CMatrix,
    /// Named pieces of F, in the order they are summed.
    pub f_terms: Vec<(&'static str, CMatrix)>,
}

impl PotentialDecomposition {
    pub fn f(&self) -> CMatrix {
        let n = self.g.nrows();
        self.f_terms.iter().fold(CMatrix::zeros(n, n), |acc, (_, m)| acc + m)
    }
}

fn check_samples<T>(name: &str, s: &Option<Vec<T>>, n: usize) -> Result<()> {
    match s {
        Some(v) if v.len() != n => Err(Error::usage(format!("{name} has {} samples, expected {n}", v.len()))),
        _ => Ok(()),
    }
}

/// Assemble G and the pieces of F.
pub fn decompose_potential(input: &PotentialInput, opts: DecompositionOptions) -> Result<PotentialDecomposition> {
    input.representation.validate()?;
    let pc = input.params;
    pc.validate()?;
    let n = input.representation.sites();
    if input.a2.len() != n || input.v.len() != n {
        return Err(Error::usage(format!(
            "field samples ({} A₂, {} V) do not match {n} sites",
            input.a2.len(),
            input.v.len()
        )));
    }
    check_samples("dV/dt", &input.dv_dt, n)?;
    check_samples("dA₂/dt", &input.da2_dt, n)?;
    let a1: Vec<[f64; 3]> = match input.representation {
        Representation::PlaneWave { .. } => {
            if input.b1 != [0.0; 3] {
                return Err(Error::usage("a plane-wave block cannot carry a constant magnetic field"));
            }
            vec![[0.0; 3]]
        }
        Representation::Lattice1d { .. } => {
            if input.b1[0] != 0.0 {
                return Err(Error::usage("on an x-lattice B₁ must be perpendicular to x"));
            }
            input
                .representation
                .positions()
                .iter()
                .map(|&x| [0.0, input.b1[2] * x, -input.b1[1] * x])
                .collect()
        }
    };

    let (cc, e, hbar) = (pc.c, pc.e, pc.hbar);
    let mc2 = pc.rest_energy();
    let gm = DiracMatrices::new();
    let id4 = CMatrix::identity(4, 4);
    let idn = CMatrix::identity(n, n);
    let rep = &input.representation;
    let p = rep.momenta(hbar);
    let comp = |a: &[[f64; 3]], j: usize| a.iter().map(|x| x[j]).collect::<Vec<f64>>();
    let pi1: Vec<CMatrix> = (0..3).map(|j| &p[j] - diag(&comp(&a1, j)) * c(e / cc, 0.0)).collect();

    let mut pi1_sq = CMatrix::zeros(n, n);
    for q in &pi1 {
        pi1_sq += q * q;
    }
    let g = kron(&id4, &(pi1_sq * c(cc * cc, 0.0) + &idn * c(mc2 * mc2, 0.0)))
        + sigma_term(&gm, rep, &p, &a1, pc, opts.derivatives);

    let vd = diag(&input.v);
    let v2: Vec<f64> = input.v.iter().map(|v| v * v).collect();
    let mut terms: Vec<(&'static str, CMatrix)> = Vec::new();
    terms.push((
        "mass_shift",
        kron(&gm.beta, &vd) * c(2.0 * mc2, 0.0) + kron(&id4, &diag(&v2)),
    ));
    let a2sq: Vec<f64> = input.a2.iter().map(|a| e * e * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2])).collect();
    terms.push(("a2_squared", kron(&id4, &diag(&a2sq))));
    let mut sym = CMatrix::zeros(n, n);
    for (j, q) in pi1.iter().enumerate() {
        let a2j = diag(&comp(&input.a2, j));
        sym += q * &a2j + &a2j * q;
    }
    terms.push(("cross_pi1_a2", kron(&id4, &(sym * c(-e * cc, 0.0)))));

    let mut cross = CMatrix::zeros(4 * n, 4 * n);
    for j in 0..3 {
        let mom = match opts.cross {
            CrossMomentum::Kinetic => &pi1[j] - diag(&comp(&input.a2, j)) * c(e / cc, 0.0),
            CrossMomentum::Canonical => p[j].clone(),
        };
        cross += kron(&gm.alpha[j], &(&vd * mom)) * c(2.0 * cc, 0.0);
    }
    terms.push(("cross_2cV_alpha_p", cross));
    terms.push(("sigma_b2", sigma_term(&gm, rep, &p, &input.a2, pc, opts.derivatives)));

    let mut alpha_e = CMatrix::zeros(4 * n, 4 * n);
    let mut grad_v = CMatrix::zeros(4 * n, 4 * n);
    for j in 0..3 {
        let dv = derivative_operator(rep, &p, &input.v, j, hbar, opts.derivatives);
        let t = kron(&gm.alpha[j], &dv);
        alpha_e -= &t * c(cc, 0.0);
        grad_v += t * c(2.0 * cc, 0.0);
        if let Some(da) = &input.da2_dt {
            alpha_e += kron(&gm.alpha[j], &diag(&comp(da, j))) * c(0.0, e * hbar);
        }
    }
    terms.push(("alpha_e", alpha_e));
    let dvdt = input.dv_dt.clone().unwrap_or_else(|| vec![0.0; n]);
    terms.push(("dv_dt", kron(&id4, &diag(&dvdt)) * c(0.0, -hbar)));
    terms.push(("grad_v", grad_v));

    Ok(PotentialDecomposition { a1, g, f_terms: terms })
}
