//! Dense complex linear algebra helpers: principal matrix square root (Schur method),
//! spectral calculus for diagonalizable matrices, Hermitian eigenpairs.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm.
pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral 2-norm through the largest singular value.
pub fn norm2(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Which eigenvalues the principal square root refuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRule {
    /// Reject eigenvalues on the closed negative real axis.
    NegativeAxis,
    /// Reject every eigenvalue with nonpositive real part.
    NonpositiveReal,
}

/// Principal square root via complex Schur form and the triangular recurrence.
pub fn sqrtm(a: &CMatrix, rule: BranchRule) -> Result<CMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::usage("sqrtm needs a square matrix"));
    }
    let scale = fro(a).max(f64::MIN_POSITIVE);
    let (q, t) = Schur::new(a.clone()).unpack();
    let mut r = CMatrix::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        let bad = match rule {
            BranchRule::NegativeAxis => lam.re <= 0.0 && lam.im.abs() <= 1e-14 * scale,
            BranchRule::NonpositiveReal => lam.re <= 0.0,
        };
        if bad {
            return Err(Error::Branch(format!(
                "eigenvalue {lam} has no principal square root under the {rule:?} rule"
            )));
        }
        r[(i, i)] = lam.sqrt();
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            let d = r[(i, i)] + r[(j, j)];
            if d.norm() == 0.0 {
                return Err(Error::Branch("coincident opposite square roots".into()));
            }
            r[(i, j)] = s / d;
        }
    }
    Ok(&q * r * q.adjoint())
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, ascending.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..a.nrows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(a.nrows(), a.ncols());
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Eigenvalues of a general complex matrix (Schur diagonal).
pub fn eigenvalues(a: &CMatrix) -> Vec<Complex64> {
    let t = Schur::new(a.clone()).unpack().1;
    (0..a.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigenvalue clusters with their spectral projections, P_λ = Π_{μ≠λ}(A − μ)/(λ − μ).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    pub projections: Vec<CMatrix>,
    /// ‖A − Σ λ P_λ‖_F / ‖A‖_F
    pub residual: f64,
}

impl SpectralDecomposition {
    /// f(A) = Σ f(λ) P_λ.
    pub fn apply(&self, f: impl Fn(Complex64) -> Complex64) -> CMatrix {
        let n = self.projections[0].nrows();
        let mut out = CMatrix::zeros(n, n);
        for (l, p) in self.eigenvalues.iter().zip(&self.projections) {
            out += p * f(*l);
        }
        out
    }
}

/// Spectral decomposition of a diagonalizable matrix; fails if A is defective.
pub fn spectral_decompose(a: &CMatrix, cluster_tol: f64) -> Result<SpectralDecomposition> {
    let n = a.nrows();
    let scale = fro(a).max(1e-300);
    let raw = eigenvalues(a);
    let mut vals: Vec<Complex64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    for l in raw {
        if let Some(k) = vals.iter().position(|v| (v - l).norm() <= cluster_tol * scale) {
            let m = mult[k] as f64;
            vals[k] = (vals[k] * m + l) / (m + 1.0);
            mult[k] += 1;
        } else {
            vals.push(l);
            mult.push(1);
        }
    }
    let id = CMatrix::identity(n, n);
    let mut projections = Vec::with_capacity(vals.len());
    for (i, li) in vals.iter().enumerate() {
        let mut p = id.clone();
        for (j, lj) in vals.iter().enumerate() {
            if i != j {
                p = p * (a - &id * *lj) / (li - lj);
            }
        }
        projections.push(p);
    }
    let mut recon = CMatrix::zeros(n, n);
    for (l, p) in vals.iter().zip(&projections) {
        recon += p * *l;
    }
    let residual = fro(&(a - recon)) / scale;
    if residual > 1e-9 {
        return Err(Error::numerical(format!(
            "matrix is not diagonalizable within tolerance (residual {residual:.3e})"
        )));
    }
    Ok(SpectralDecomposition {
        eigenvalues: vals,
        multiplicities: mult,
        projections,
        residual,
    })
}
