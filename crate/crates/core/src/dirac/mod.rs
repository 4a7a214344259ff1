//! Dirac operator with the scalar potential treated as part of the mass,
//! D = cα·π + β(mc² + βV), on desk-scale discretizations.
//!
//! Two representations share one code path: a plane-wave block (a single "site" whose
//! momentum is ħk) and a 1D lattice along x with centred differences for p_x. Transverse
//! momenta on the lattice are fixed numbers. Spinor index is the slow index, so an operator
//! on a representation with N sites is a 4N×4N matrix built from Kronecker products.

pub mod check;
pub mod export;
pub mod nonrel;
pub mod series;

pub use check::{eigenpairs, sqrt_equation_check, Eigenpair, SqrtCheckReport, SqrtCheckRow};
pub use export::{write_matrix, MatrixFormat};
pub use check::{lowest_abs, principal_sqrtm, SqrtCheckOptions, MAX_DENSE_DIM};
pub use nonrel::{
    first_order_expansion, schrodinger_limit, schrodinger_operator, schrodinger_scaling, FirstOrderExpansion,
    SchrodingerReport, SchrodingerRow,
};
pub use series::{
    binom_half, decompose_potential, perturbation_series, DecompositionOptions, PerturbationOrder,
    PerturbationResult, PotentialDecomposition, PotentialInput, SeriesOptions,
};

use crate::error::{Error, Result};
use crate::kernel::mass::pauli;
use crate::linalg::{c, fro, CMatrix};
use crate::params::PhysicalParams;

/// α₁, α₂, α₃, β and Σ₁, Σ₂, Σ₃ in the Dirac–Pauli basis.
#[derive(Debug, Clone)]
pub struct DiracMatrices {
    pub alpha: [CMatrix; 3],
    pub beta: CMatrix,
    pub sigma: [CMatrix; 3],
}

impl DiracMatrices {
    pub fn new() -> Self {
        let s = pauli();
        let z = CMatrix::zeros(2, 2);
        let i2 = CMatrix::identity(2, 2);
        let block = |a: &CMatrix, b: &CMatrix, cc: &CMatrix, d: &CMatrix| {
            let mut m = CMatrix::zeros(4, 4);
            m.view_mut((0, 0), (2, 2)).copy_from(a);
            m.view_mut((0, 2), (2, 2)).copy_from(b);
            m.view_mut((2, 0), (2, 2)).copy_from(cc);
            m.view_mut((2, 2), (2, 2)).copy_from(d);
            m
        };
        DiracMatrices {
            alpha: [0, 1, 2].map(|j| block(&z, &s[j], &s[j], &z)),
            beta: block(&i2, &z, &z, &(-&i2)),
            sigma: [0, 1, 2].map(|j| block(&s[j], &z, &z, &s[j])),
        }
    }
}

impl Default for DiracMatrices {
    fn default() -> Self {
        Self::new()
    }
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s.norm() == 0.0 {
                continue;
            }
            out.view_mut((i * rb, j * cb), (rb, cb)).copy_from(&(b * s));
        }
    }
    out
}

pub(crate) fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&crate::linalg::CVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Where the operator lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Representation {
    /// One plane wave e^{ik·x}; fields must be constant.
    PlaneWave { k: [f64; 3] },
    /// `n` sites x_i = (i − (n−1)/2)h with zero boundary values, centred difference for
    /// p_x, and fixed transverse wavenumbers.
    Lattice1d { n: usize, h: f64, k_perp: [f64; 2] },
}

impl Representation {
    pub fn sites(&self) -> usize {
        match self {
            Representation::PlaneWave { .. } => 1,
            Representation::Lattice1d { n, .. } => *n,
        }
    }

    /// Site coordinates along x (a single 0 for the plane wave).
    pub fn positions(&self) -> Vec<f64> {
        match *self {
            Representation::PlaneWave { .. } => vec![0.0],
            Representation::Lattice1d { n, h, .. } => {
                (0..n).map(|i| (i as f64 - (n as f64 - 1.0) / 2.0) * h).collect()
            }
        }
    }

    /// Canonical momentum matrices p_j (N×N).
    pub fn momenta(&self, hbar: f64) -> [CMatrix; 3] {
        match *self {
            Representation::PlaneWave { k } => k.map(|kj| CMatrix::from_element(1, 1, c(hbar * kj, 0.0))),
            Representation::Lattice1d { n, h, k_perp } => {
                let mut px = CMatrix::zeros(n, n);
                let w = c(0.0, -hbar / (2.0 * h));
                for i in 0..n {
                    if i + 1 < n {
                        px[(i, i + 1)] = w;
                    }
                    if i > 0 {
                        px[(i, i - 1)] = -w;
                    }
                }
                let id = CMatrix::identity(n, n);
                [px, &id * c(hbar * k_perp[0], 0.0), &id * c(hbar * k_perp[1], 0.0)]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Representation::PlaneWave { k } if k.iter().all(|v| v.is_finite()) => Ok(()),
            Representation::Lattice1d { n, h, k_perp } if n >= 3 && h > 0.0 && h.is_finite() && k_perp.iter().all(|v| v.is_finite()) => Ok(()),
            _ => Err(Error::usage(format!("invalid representation {self:?}"))),
        }
    }
}

/// Which momentum multiplies 2cV α· in the squared operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossMomentum {
    /// 2cV α·π: the product D² actually produces.
    #[default]
    Kinetic,
    /// 2cV α·p as printed; differs from D² by −2eV α·A.
    Canonical,
}

/// How field derivatives (∇V, B = ∇×A) enter the squared operator on a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Derivatives {
    /// −iħ∂_j f ↦ [p_j, f]: the squared operator equals D² to rounding.
    #[default]
    Commutator,
    /// Diagonal multiplication by centred differences of the samples.
    Pointwise,
}

/// D = cα·(p − eA/c) + mc²β + V with time-independent A(x) and V(x).
#[derive(Debug, Clone)]
pub struct DiracOperator {
    pub representation: Representation,
    /// Vector potential per site.
    pub a: Vec<[f64; 3]>,
    /// Scalar potential energy V = eφ per site.
    pub v: Vec<f64>,
    pub params: PhysicalParams,
    /// ∂V/∂t per site; anything nonzero is rejected by the squared operator.
    pub dv_dt: Option<Vec<f64>>,
    /// ∂A/∂t per site; anything nonzero is rejected by the squared operator.
    pub da_dt: Option<Vec<[f64; 3]>>,
}

impl DiracOperator {
    /// Plane-wave block with constant fields.
    pub fn plane_wave(k: [f64; 3], a: [f64; 3], v: f64, params: PhysicalParams) -> Result<Self> {
        Self::new(Representation::PlaneWave { k }, vec![a], vec![v], params)
    }

    /// 1D lattice with constant A and V(x) sampled from `v`.
    pub fn lattice(n: usize, h: f64, a: [f64; 3], v: impl Fn(f64) -> f64, params: PhysicalParams) -> Result<Self> {
        let rep = Representation::Lattice1d { n, h, k_perp: [0.0, 0.0] };
        let vs = rep.positions().into_iter().map(v).collect();
        Self::new(rep, vec![a; n], vs, params)
    }

    pub fn new(representation: Representation, a: Vec<[f64; 3]>, v: Vec<f64>, params: PhysicalParams) -> Result<Self> {
        representation.validate()?;
        params.validate()?;
        let n = representation.sites();
        if a.len() != n || v.len() != n {
            return Err(Error::usage(format!(
                "field samples ({} A, {} V) do not match {} sites",
                a.len(),
                v.len(),
                n
            )));
        }
        if a.iter().flatten().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::domain("field samples must be finite"));
        }
        Ok(DiracOperator {
            representation,
            a,
            v,
            params,
            dv_dt: None,
            da_dt: None,
        })
    }

    pub fn sites(&self) -> usize {
        self.representation.sites()
    }

    pub fn dim(&self) -> usize {
        4 * self.sites()
    }

    /// Kinetic momenta π_j = p_j − (e/c)A_j (N×N).
    pub fn kinetic_momenta(&self) -> [CMatrix; 3] {
        let p = self.representation.momenta(self.params.hbar);
        let s = self.params.e / self.params.c;
        let mut out = p;
        for (j, pj) in out.iter_mut().enumerate() {
            let aj: Vec<f64> = self.a.iter().map(|a| s * a[j]).collect();
            *pj -= diag(&aj);
        }
        out
    }

    /// The 4N×4N matrix of D.
    pub fn matrix(&self) -> CMatrix {
        let g = DiracMatrices::new();
        let n = self.sites();
        let pc = self.params;
        let pi = self.kinetic_momenta();
        let mut d = kron(&g.beta, &CMatrix::identity(n, n)) * c(pc.rest_energy(), 0.0);
        d += kron(&CMatrix::identity(4, 4), &diag(&self.v));
        for j in 0..3 {
            d += kron(&g.alpha[j], &pi[j]) * c(pc.c, 0.0);
        }
        d
    }

    fn is_static(&self) -> bool {
        let zero_v = self.dv_dt.as_ref().is_none_or(|v| v.iter().all(|&x| x == 0.0));
        let zero_a = self.da_dt.as_ref().is_none_or(|v| v.iter().flatten().all(|&x| x == 0.0));
        zero_v && zero_a
    }
}

/// Centred differences of site samples (one-sided at the ends); zero for a plane wave.
pub(crate) fn sample_gradient(rep: &Representation, f: &[f64]) -> Vec<f64> {
    match *rep {
        Representation::PlaneWave { .. } => vec![0.0; f.len()],
        Representation::Lattice1d { n, h, .. } => (0..n)
            .map(|i| {
                if i == 0 {
                    (f[1] - f[0]) / h
                } else if i == n - 1 {
                    (f[n - 1] - f[n - 2]) / h
                } else {
                    (f[i + 1] - f[i - 1]) / (2.0 * h)
                }
            })
            .collect(),
    }
}

/// −iħ ∂_j f as an N×N matrix, in either derivative convention.
pub(crate) fn derivative_operator(
    rep: &Representation,
    p: &[CMatrix; 3],
    f: &[f64],
    j: usize,
    hbar: f64,
    mode: Derivatives,
) -> CMatrix {
    match mode {
        Derivatives::Commutator => commutator(&p[j], &diag(f)),
        Derivatives::Pointwise => {
            if j == 0 {
                diag(&sample_gradient(rep, f)) * c(0.0, -hbar)
            } else {
                CMatrix::zeros(f.len(), f.len())
            }
        }
    }
}

/// Options for [`squared_operator`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquaredOptions {
    pub cross: CrossMomentum,
    pub derivatives: Derivatives,
}

/// The new Klein–Gordon operator, term by term.
#[derive(Debug, Clone)]
pub struct SquaredOperator {
    /// c²π²
    pub c2_pi2: CMatrix,
    /// 2cV α·π (or α·p)
    pub cross: CMatrix,
    /// −eħc Σ·B
    pub sigma_b: CMatrix,
    /// −ieħc α·E with E = −∇φ
    pub alpha_e: CMatrix,
    /// −iħ ∂V/∂t (zero: static fields only)
    pub dv_dt: CMatrix,
    /// −2iħc α·∇V
    pub grad_v: CMatrix,
    /// (mc² + βV)²
    pub mass: CMatrix,
    pub options: SquaredOptions,
}

impl SquaredOperator {
    pub fn terms(&self) -> [(&'static str, &CMatrix); 7] {
        [
            ("c2_pi2", &self.c2_pi2),
            ("cross_2cV_alpha_p", &self.cross),
            ("sigma_b", &self.sigma_b),
            ("alpha_e", &self.alpha_e),
            ("dv_dt", &self.dv_dt),
            ("grad_v", &self.grad_v),
            ("mass_squared", &self.mass),
        ]
    }

    pub fn total(&self) -> CMatrix {
        let mut t = self.c2_pi2.clone();
        for (_, m) in &self.terms()[1..] {
            t += *m;
        }
        t
    }
}

/// Σ_{j<k} α_jα_k ⊗ X_jk, the spin structure of c²(α·π)² − c²π².
fn spin_commutator_term(g: &DiracMatrices, x: impl Fn(usize, usize) -> CMatrix) -> CMatrix {
    let mut out: Option<CMatrix> = None;
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        let t = kron(&(&g.alpha[j] * &g.alpha[k]), &x(j, k));
        out = Some(match out {
            None => t,
            Some(o) => o + t,
        });
    }
    out.expect("three pairs")
}

/// −eħc Σ·B as c² Σ_{j<k} α_jα_k [π_j, π_k], with [π_j, π_k] = −(e/c)(∂̂_j A_k − ∂̂_k A_j) and
/// ∂̂_j f standing for −iħ∂_j f in the chosen derivative convention.
pub(crate) fn sigma_term(
    g: &DiracMatrices,
    rep: &Representation,
    p: &[CMatrix; 3],
    a: &[[f64; 3]],
    pc: PhysicalParams,
    mode: Derivatives,
) -> CMatrix {
    let comp = |j: usize| a.iter().map(|x| x[j]).collect::<Vec<f64>>();
    spin_commutator_term(g, |j, k| {
        let djak = derivative_operator(rep, p, &comp(k), j, pc.hbar, mode);
        let dkaj = derivative_operator(rep, p, &comp(j), k, pc.hbar, mode);
        (djak - dkaj) * c(-pc.e * pc.c, 0.0)
    })
}

/// Assemble c²π² + 2cVα·π − eħcΣ·B − ieħcα·E − iħ∂V/∂t − 2iħcα·∇V + (mc² + βV)².
pub fn squared_operator(op: &DiracOperator, opts: SquaredOptions) -> Result<SquaredOperator> {
    if !op.is_static() {
        return Err(Error::Unsupported(
            "time-dependent fields: only static A and V are assembled".into(),
        ));
    }
    let g = DiracMatrices::new();
    let n = op.sites();
    let pc = op.params;
    let (cc, hbar) = (pc.c, pc.hbar);
    let id4 = CMatrix::identity(4, 4);
    let idn = CMatrix::identity(n, n);
    let p = op.representation.momenta(hbar);
    let pi = op.kinetic_momenta();
    let vd = diag(&op.v);

    let mut pi2 = CMatrix::zeros(n, n);
    for pj in &pi {
        pi2 += pj * pj;
    }
    let c2_pi2 = kron(&id4, &pi2) * c(cc * cc, 0.0);

    let mut cross = CMatrix::zeros(4 * n, 4 * n);
    for j in 0..3 {
        let mom = match opts.cross {
            CrossMomentum::Kinetic => &pi[j],
            CrossMomentum::Canonical => &p[j],
        };
        cross += kron(&g.alpha[j], &(&vd * mom)) * c(2.0 * cc, 0.0);
    }

    let sigma_b = sigma_term(&g, &op.representation, &p, &op.a, pc, opts.derivatives);

    // −ieħc α·E = iħc α·∇V = −c α_j (−iħ∂_jV); −2iħc α·∇V = 2c α_j (−iħ∂_jV).
    let mut alpha_e = CMatrix::zeros(4 * n, 4 * n);
    let mut grad_v = CMatrix::zeros(4 * n, 4 * n);
    for j in 0..3 {
        let dv = derivative_operator(&op.representation, &p, &op.v, j, hbar, opts.derivatives);
        let t = kron(&g.alpha[j], &dv);
        alpha_e -= &t * c(cc, 0.0);
        grad_v += t * c(2.0 * cc, 0.0);
    }

    let mc2 = pc.rest_energy();
    let v2: Vec<f64> = op.v.iter().map(|v| v * v).collect();
    let mass = kron(&id4, &(&idn * c(mc2 * mc2, 0.0) + diag(&v2))) + kron(&g.beta, &vd) * c(2.0 * mc2, 0.0);

    Ok(SquaredOperator {
        c2_pi2,
        cross,
        sigma_b,
        alpha_e,
        dv_dt: CMatrix::zeros(4 * n, 4 * n),
        grad_v,
        mass,
        options: opts,
    })
}

/// Hermiticity of the squared operator and of its non-Hermitian pieces.
#[derive(Debug, Clone, Copy)]
pub struct HermiticityAudit {
    /// ‖D² − (D²)*‖_F / ‖D²‖_F
    pub d_squared: f64,
    /// Same for the assembled operator.
    pub assembled: f64,
    /// ‖X − X*‖_F for X = 2cVα·π alone.
    pub cross_antihermitian: f64,
    /// ‖X − X*‖_F for X = −ieħcα·E − 2iħcα·∇V.
    pub gradient_antihermitian: f64,
    /// ‖X − X*‖_F for the sum of both; cancels when the assembly is exact.
    pub combined_antihermitian: f64,
    /// ‖D² − assembled‖_F / ‖D²‖_F
    pub identity_residual: f64,
}

pub fn hermiticity_audit(op: &DiracOperator, sq: &SquaredOperator) -> HermiticityAudit {
    let d = op.matrix();
    let d2 = &d * &d;
    let total = sq.total();
    let scale = fro(&d2).max(f64::MIN_POSITIVE);
    let ah = |m: &CMatrix| fro(&(m - m.adjoint()));
    let grad = &sq.alpha_e + &sq.grad_v;
    HermiticityAudit {
        d_squared: ah(&d2) / scale,
        assembled: ah(&total) / scale,
        cross_antihermitian: ah(&sq.cross),
        gradient_antihermitian: ah(&grad),
        combined_antihermitian: ah(&(&sq.cross + &grad)),
        identity_residual: fro(&(&d2 - &total)) / scale,
    }
}
