//! Eigenpairs of D and the check of E ψ = β√M ψ with M the assembled squared operator.

use super::{squared_operator, DiracMatrices, DiracOperator, Representation, SquaredOptions};
use crate::error::{Error, Result};
use crate::linalg::{c, eigenvalues, fro, hermitian_eigen, sqrtm, BranchRule, CMatrix, CVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Largest matrix the dense checks accept.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub energy: f64,
    pub vector: CVector,
    /// Fraction of |ψ|² at lattice wavenumbers above π/2h (fermion doublers); 0 for plane waves.
    pub doubler_weight: f64,
}

impl Eigenpair {
    pub fn is_doubler(&self) -> bool {
        self.doubler_weight > 0.5
    }
}

/// Projector weight matrix V*Π_high V for columns V, with Π_high keeping lattice
/// wavenumbers above π/2h.
fn high_momentum_gram(n: usize, vecs: &[CVector]) -> CMatrix {
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let norm = 1.0 / (n as f64).sqrt();
    let spectra: Vec<Vec<Complex64>> = vecs
        .iter()
        .map(|v| {
            let mut out = Vec::with_capacity(4 * n);
            for s in 0..4 {
                let mut buf: Vec<Complex64> = (0..n).map(|i| v[s * n + i]).collect();
                fft.process(&mut buf);
                out.extend(buf.into_iter().enumerate().map(|(m, z)| {
                    if 4 * m.min(n - m) > n {
                        z * norm
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }));
            }
            out
        })
        .collect();
    let k = vecs.len();
    CMatrix::from_fn(k, k, |i, j| spectra[i].iter().zip(&spectra[j]).map(|(a, b)| a.conj() * b).sum())
}

/// Within each degenerate cluster, rotate to eigenvectors of the high-momentum projector so
/// that physical and doubler states separate. Returns the doubler weight of each column.
fn separate_doublers(rep: &Representation, vals: &[f64], vecs: &mut [CVector]) -> Vec<f64> {
    let Representation::Lattice1d { n, .. } = *rep else {
        return vec![0.0; vals.len()];
    };
    let scale = vals.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    let mut weights = vec![0.0; vals.len()];
    let mut start = 0;
    while start < vals.len() {
        let mut end = start + 1;
        while end < vals.len() && vals[end] - vals[end - 1] <= 1e-9 * scale {
            end += 1;
        }
        let (w, u) = hermitian_eigen(&high_momentum_gram(n, &vecs[start..end]));
        let block: Vec<CVector> = vecs[start..end].to_vec();
        for (col, &wk) in w.iter().enumerate() {
            let mut v = CVector::zeros(4 * n);
            for (r, b) in block.iter().enumerate() {
                v += b * u[(r, col)];
            }
            vecs[start + col] = v;
            weights[start + col] = wk.clamp(0.0, 1.0);
        }
        start = end;
    }
    weights
}

/// All eigenpairs of D (Hermitian for real fields), ascending in energy. Degenerate lattice
/// eigenvectors are rotated so that each is either mostly physical or mostly doubler.
pub fn eigenpairs(op: &DiracOperator) -> Result<Vec<Eigenpair>> {
    if op.dim() > MAX_DENSE_DIM {
        return Err(Error::usage(format!("matrix size {} exceeds {MAX_DENSE_DIM}", op.dim())));
    }
    let (vals, vecs) = hermitian_eigen(&op.matrix());
    let mut cols: Vec<CVector> = (0..vals.len()).map(|k| vecs.column(k).into_owned()).collect();
    let weights = separate_doublers(&op.representation, &vals, &mut cols);
    Ok(vals
        .into_iter()
        .zip(cols)
        .zip(weights)
        .map(|((energy, vector), doubler_weight)| Eigenpair {
            energy,
            vector,
            doubler_weight,
        })
        .collect())
}

/// The `count` physical (non-doubler) eigenpairs of smallest |E|.
pub fn lowest_abs(pairs: Vec<Eigenpair>, count: usize) -> Vec<Eigenpair> {
    let mut v: Vec<Eigenpair> = pairs.into_iter().filter(|p| !p.is_doubler()).collect();
    v.sort_by(|a, b| a.energy.abs().total_cmp(&b.energy.abs()));
    v.truncate(count);
    v
}

/// Principal square root of M. Hermitian input goes through its eigendecomposition, anything
/// else through the Schur method; eigenvalues on the closed negative axis are a branch error.
pub fn principal_sqrtm(m: &CMatrix) -> Result<(CMatrix, &'static str)> {
    let scale = fro(m).max(f64::MIN_POSITIVE);
    if fro(&(m - m.adjoint())) <= 1e-13 * scale {
        let (vals, vecs) = hermitian_eigen(m);
        let top = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if let Some(bad) = vals.iter().find(|&&l| l <= 1e-14 * top) {
            return Err(Error::Branch(format!("eigenvalue {bad:.3e} of M is on the nonpositive real axis")));
        }
        let d = CVector::from_iterator(vals.len(), vals.iter().map(|l| c(l.sqrt(), 0.0)));
        Ok((&vecs * CMatrix::from_diagonal(&d) * vecs.adjoint(), "hermitian-eigen"))
    } else {
        Ok((sqrtm(m, BranchRule::NegativeAxis)?, "schur"))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SqrtCheckOptions {
    pub squared: SquaredOptions,
    /// Check only this many lowest-|E| physical eigenpairs; `None` checks all.
    pub select: Option<usize>,
    pub tol: f64,
}

impl Default for SqrtCheckOptions {
    fn default() -> Self {
        SqrtCheckOptions {
            squared: SquaredOptions::default(),
            select: None,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SqrtCheckRow {
    pub energy: f64,
    /// ‖β√M ψ − Eψ‖/‖ψ‖
    pub residual_beta_left: f64,
    /// ‖√M β ψ − Eψ‖/‖ψ‖
    pub residual_beta_right: f64,
    /// ‖√M ψ − |E|ψ‖/‖ψ‖: whether √M acts as |D| on ψ.
    pub abs_residual: f64,
    /// ⟨ψ|β|ψ⟩/⟨ψ|ψ⟩; ±1 exactly when βψ = ±ψ.
    pub beta_expectation: f64,
    pub doubler_weight: f64,
    /// Left residual below tolerance.
    pub consistent: bool,
}

#[derive(Debug, Clone)]
pub struct SqrtCheckReport {
    pub rows: Vec<SqrtCheckRow>,
    /// ‖(√M)² − M‖_F/‖M‖_F
    pub sqrt_residual: f64,
    pub method: &'static str,
    /// Sorted eigenvalues of β√M against those of D (only for dim ≤ 512):
    /// max |λ(β√M) − E| after sorting both by real part.
    pub spectrum_distance: Option<f64>,
    pub tol: f64,
}

impl SqrtCheckReport {
    pub fn inconsistent(&self) -> usize {
        self.rows.iter().filter(|r| !r.consistent).count()
    }
}

/// For each eigenpair (E, ψ) of D, compare β√M ψ and √M β ψ with Eψ, with √M the principal
/// root of the assembled squared operator.
pub fn sqrt_equation_check(op: &DiracOperator, opts: SqrtCheckOptions) -> Result<SqrtCheckReport> {
    if op.dim() > MAX_DENSE_DIM {
        return Err(Error::usage(format!("matrix size {} exceeds {MAX_DENSE_DIM}", op.dim())));
    }
    let m = squared_operator(op, opts.squared)?.total();
    let (root, method) = principal_sqrtm(&m)?;
    let sqrt_residual = fro(&(&root * &root - &m)) / fro(&m).max(f64::MIN_POSITIVE);
    let n = op.sites();
    let beta = super::kron(&DiracMatrices::new().beta, &CMatrix::identity(n, n));
    let left = &beta * &root;
    let right = &root * &beta;

    let mut pairs = eigenpairs(op)?;
    if let Some(k) = opts.select {
        pairs = lowest_abs(pairs, k);
    }
    let rows = pairs
        .iter()
        .map(|p| {
            let psi = &p.vector;
            let norm = psi.norm();
            let e_psi = psi * c(p.energy, 0.0);
            let rl = (&left * psi - &e_psi).norm() / norm;
            let rr = (&right * psi - &e_psi).norm() / norm;
            let ra = (&root * psi - psi * c(p.energy.abs(), 0.0)).norm() / norm;
            let bexp = psi.dotc(&(&beta * psi)).re / (norm * norm);
            SqrtCheckRow {
                energy: p.energy,
                residual_beta_left: rl,
                residual_beta_right: rr,
                abs_residual: ra,
                beta_expectation: bexp,
                doubler_weight: p.doubler_weight,
                consistent: rl <= opts.tol,
            }
        })
        .collect();

    let spectrum_distance = (op.dim() <= 512).then(|| {
        let mut a = eigenvalues(&left);
        let mut b = eigenvalues(&op.matrix());
        let key = |z: &Complex64, w: &Complex64| z.re.total_cmp(&w.re).then(z.im.total_cmp(&w.im));
        a.sort_by(key);
        b.sort_by(key);
        a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    });

    Ok(SqrtCheckReport {
        rows,
        sqrt_residual,
        method,
        spectrum_distance,
        tol: opts.tol,
    })
}
