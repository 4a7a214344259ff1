//! First-order expansion of β√M and the positive-energy Schrödinger-type limit.

use super::{kron, squared_operator, CrossMomentum, DiracMatrices, DiracOperator, SquaredOptions};
use crate::error::{Error, Result};
use crate::linalg::{c, fro, hermitian_eigen, CMatrix};
use crate::params::PhysicalParams;

/// βmc²(1 + X/2) with X = M/m²c⁴ − 1, next to the printed first-order operator.
#[derive(Debug, Clone)]
pub struct FirstOrderExpansion {
    /// β(m²c⁴ + M)/(2mc²), the literal first-order truncation.
    pub derived: CMatrix,
    /// βmc² + V + βV²/2mc² + βπ²/2m + Vα·p/mc² − eħβΣ·B/2mc − ieħβα·E/2mc − (iħ/mc)βα·∇V.
    pub printed: CMatrix,
    /// ‖printed − derived‖_F
    pub defect: f64,
    /// ‖printed − derived − (V α·p/mc² − βVα·p/mc)‖_F: zero when the cross term is the
    /// only disagreement.
    pub defect_after_cross_fix: f64,
}

fn require_massive(p: &PhysicalParams) -> Result<f64> {
    let mc2 = p.rest_energy();
    if mc2 <= 0.0 {
        return Err(Error::domain("the nonrelativistic expansion needs m > 0"));
    }
    Ok(mc2)
}

pub fn first_order_expansion(op: &DiracOperator) -> Result<FirstOrderExpansion> {
    let pc = op.params;
    let mc2 = require_massive(&pc)?;
    let opts = SquaredOptions {
        cross: CrossMomentum::Canonical,
        ..Default::default()
    };
    let sq = squared_operator(op, opts)?;
    let g = DiracMatrices::new();
    let n = op.sites();
    let idn = CMatrix::identity(n, n);
    let beta = kron(&g.beta, &idn);
    let dim = 4 * n;
    let id = CMatrix::identity(dim, dim);
    let inv = c(1.0 / (2.0 * mc2), 0.0);
    let derived = &beta * (&id * c(mc2 * mc2, 0.0) + sq.total()) * inv;

    let vdiag = CMatrix::from_diagonal(&crate::linalg::CVector::from_iterator(
        n,
        op.v.iter().map(|&x| c(x, 0.0)),
    ));
    let v4 = kron(&CMatrix::identity(4, 4), &vdiag);
    let v2 = &v4 * &v4;
    let p = op.representation.momenta(pc.hbar);
    let mut v_alpha_p = CMatrix::zeros(dim, dim);
    for j in 0..3 {
        v_alpha_p += kron(&g.alpha[j], &(&vdiag * &p[j]));
    }
    let printed = &beta * c(mc2, 0.0)
        + &v4
        + &beta * &v2 * inv
        + &beta * &sq.c2_pi2 * inv
        + &v_alpha_p * c(1.0 / mc2, 0.0)
        + &beta * (&sq.sigma_b + &sq.alpha_e + &sq.grad_v) * inv;

    let diff = &printed - &derived;
    let cross_fix = &v_alpha_p * c(1.0 / mc2, 0.0) - &beta * &v_alpha_p * c(1.0 / (pc.m * pc.c), 0.0);
    Ok(FirstOrderExpansion {
        defect: fro(&diff),
        defect_after_cross_fix: fro(&(&diff - &cross_fix)),
        derived,
        printed,
    })
}

/// Upper (positive-energy) 2N×2N block π²/2m + V + mc² − (eħ/2mc)σ·B + V²/2mc².
pub fn schrodinger_operator(op: &DiracOperator) -> Result<CMatrix> {
    let mc2 = require_massive(&op.params)?;
    let sq = squared_operator(op, SquaredOptions::default())?;
    let n = op.sites();
    let vd: Vec<_> = op.v.iter().map(|&v| c(v + mc2 + v * v / (2.0 * mc2), 0.0)).collect();
    let pot = kron(
        &CMatrix::identity(4, 4),
        &CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(vd)),
    );
    let full = (&sq.c2_pi2 + &sq.sigma_b) * c(1.0 / (2.0 * mc2), 0.0) + pot;
    Ok(full.view((0, 0), (2 * n, 2 * n)).into_owned())
}

/// Positive Dirac energies against the Schrödinger-limit eigenvalues.
#[derive(Debug, Clone)]
pub struct SchrodingerRow {
    pub scale: f64,
    pub v: f64,
    pub hbar_k: f64,
    /// Largest |E_exact − E_limit| over the positive-energy states.
    pub max_defect: f64,
    /// max_defect / mc²
    pub relative_defect: f64,
}

#[derive(Debug, Clone)]
pub struct SchrodingerReport {
    pub rows: Vec<SchrodingerRow>,
    /// Least-squares slope of log(max_defect) against log(scale).
    pub exponent: f64,
    /// max_defect(s)/max_defect(s/2), averaged over consecutive halvings.
    pub halving_ratio: f64,
}

/// Exact positive energies of D and the eigenvalues of the limit operator, both ascending.
pub fn schrodinger_limit(op: &DiracOperator) -> Result<(CMatrix, Vec<f64>, Vec<f64>)> {
    let s = schrodinger_operator(op)?;
    let (approx, _) = hermitian_eigen(&s);
    let (all, _) = hermitian_eigen(&op.matrix());
    let exact: Vec<f64> = all[all.len() - approx.len()..].to_vec();
    if exact.iter().any(|&e| e <= 0.0) {
        return Err(Error::domain("fewer positive Dirac energies than Schrödinger states"));
    }
    Ok((s, exact, approx))
}

/// Plane waves along x with V = s·v0 and ħk = s·hbar_k0 for each scale s.
pub fn schrodinger_scaling(v0: f64, hbar_k0: f64, scales: &[f64], params: PhysicalParams) -> Result<SchrodingerReport> {
    let mc2 = require_massive(&params)?;
    if scales.len() < 2 {
        return Err(Error::usage("need at least two scales"));
    }
    let mut rows = Vec::new();
    for &s in scales {
        let k = s * hbar_k0 / params.hbar;
        let op = DiracOperator::plane_wave([k, 0.0, 0.0], [0.0; 3], s * v0, params)?;
        let (_, exact, approx) = schrodinger_limit(&op)?;
        let max_defect = exact.iter().zip(&approx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        rows.push(SchrodingerRow {
            scale: s,
            v: s * v0,
            hbar_k: s * hbar_k0,
            max_defect,
            relative_defect: max_defect / mc2,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.scale.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.max_defect.max(f64::MIN_POSITIVE).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let ratios: Vec<f64> = rows
        .windows(2)
        .map(|w| (w[0].max_defect / w[1].max_defect).powf((2.0f64).ln() / (w[0].scale / w[1].scale).ln()))
        .collect();
    Ok(SchrodingerReport {
        exponent: sxy / sxx,
        halving_ratio: ratios.iter().sum::<f64>() / ratios.len() as f64,
        rows,
    })
}
