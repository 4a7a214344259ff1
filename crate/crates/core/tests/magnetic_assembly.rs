use num_complex::Complex64;
use sqrtop::field::{Field, Grid};
use sqrtop::kernel::magnetic::symmetric_gauge;
use sqrtop::kernel::{
    apply_constant_a, apply_constant_b, apply_free, general_assembly, mass_matrix, polar_decompose,
    polar_decompose_matrix, AssemblyInput, MassConstruction, MassModel, LEVY_NORMALIZATION, ZETA_INV_R2,
};
use sqrtop::linalg::CMatrix;
use sqrtop::params::PhysicalParams;
use sqrtop::special::bessel_k;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian(x: [f64; 3]) -> Complex64 {
    c((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.0)
}

fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn spinor(grid: Grid) -> Field {
    let parts: Vec<Field> = (0..4)
        .map(|k| Field::from_fn(grid, |x| gaussian(x) * c(1.0 + 0.3 * k as f64, 0.2 * x[0] - 0.1 * k as f64)))
        .collect();
    Field::from_components(&parts).unwrap()
}

#[test]
fn mass_matrix_examples() {
    let p = PhysicalParams::natural();
    for cons in [MassConstruction::VerbatimBlock, MassConstruction::HermitianSigmaB] {
        let m = mass_matrix([0.0; 3], &p, cons).unwrap();
        assert!((m.mu_squared.clone() - CMatrix::identity(4, 4)).norm() < 1e-15);
    }
    // Longitudinal field: both constructions agree.
    let v = mass_matrix([0.0, 0.0, 0.5], &p, MassConstruction::VerbatimBlock).unwrap();
    let h = mass_matrix([0.0, 0.0, 0.5], &p, MassConstruction::HermitianSigmaB).unwrap();
    for (a, b) in v.eigenvalues.iter().zip(&h.eigenvalues) {
        assert!((a - b).norm() < 1e-12);
    }
    let want = [0.5, 0.5, 1.5, 1.5];
    for (g, w) in v.eigenvalues.iter().zip(want) {
        assert!((g - c(w, 0.0)).norm() < 1e-12);
    }
    // Transverse field: the verbatim block has complex eigenvalues 1 ± 0.5i, each doubled.
    let t = mass_matrix([0.5, 0.0, 0.0], &p, MassConstruction::VerbatimBlock).unwrap();
    let mut minus = 0;
    let mut plus = 0;
    for e in &t.eigenvalues {
        if (e - c(1.0, -0.5)).norm() < 1e-12 {
            minus += 1;
        }
        if (e - c(1.0, 0.5)).norm() < 1e-12 {
            plus += 1;
        }
    }
    assert_eq!((minus, plus), (2, 2));
    let herm = mass_matrix([0.5, 0.0, 0.0], &p, MassConstruction::HermitianSigmaB).unwrap();
    assert!((herm.mu_squared.clone() - herm.mu_squared.adjoint()).norm() < 1e-15);
    assert!(herm.eigenvalues.iter().all(|e| e.im.abs() < 1e-12));
}

#[test]
fn polar_examples() {
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(3.0, 0.0)]));
    let f = polar_decompose_matrix(&d).unwrap();
    assert!((f.u.clone() - CMatrix::identity(4, 4)).norm() < 1e-12);
    assert!((f.abs_mu.clone() - d).norm() < 1e-12);
    let s = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]));
    let f = polar_decompose_matrix(&s).unwrap();
    assert!((f.u.clone() - s).norm() < 1e-12);
    assert!((f.abs_mu.clone() - CMatrix::identity(4, 4)).norm() < 1e-12);
    let mm = mass_matrix([0.5, 0.0, 0.0], &PhysicalParams::natural(), MassConstruction::VerbatimBlock).unwrap();
    let f = polar_decompose(&mm).unwrap();
    assert!(f.residual < 1e-12);
    assert!(f.isometry_defect < 1e-12);
    // U is unitary but not Hermitian: its eigenvalues are non-real phases.
    assert!((f.u.clone() - f.u.adjoint()).norm() > 1e-3);
    // |μ| is the Hermitian square root of μ*μ.
    let mu = mm.mu().unwrap();
    assert!((&f.abs_mu * &f.abs_mu - mu.adjoint() * &mu).norm() < 1e-12);
    // μ squares back to μ².
    assert!((&mu * &mu - &mm.mu_squared).norm() < 1e-12);
}

#[test]
fn zero_field_is_free() {
    let params = PhysicalParams::natural();
    let psi = spinor(Grid::open(10, 0.5).unwrap());
    for model in [
        MassModel::Scalar,
        MassModel::Matrix(MassConstruction::VerbatimBlock),
        MassModel::Matrix(MassConstruction::HermitianSigmaB),
    ] {
        let (out, br) = apply_constant_b(&psi, [0.0; 3], &params, model).unwrap();
        let free = apply_free(&psi, &params).unwrap();
        assert!(rel_diff(&out.data, &free.data) < 1e-14);
        assert_eq!(br.magnitudes[1], (0.0, 0.0));
        assert_eq!(br.magnitudes[2], (0.0, 0.0));
    }
}

#[test]
fn linear_response_in_b() {
    let params = PhysicalParams::natural();
    let psi = spinor(Grid::open(10, 0.5).unwrap());
    for model in [MassModel::Matrix(MassConstruction::HermitianSigmaB), MassModel::Scalar] {
        let (base, _) = apply_constant_b(&psi, [0.0; 3], &params, model).unwrap();
        let diff = |b3: f64| -> Vec<Complex64> {
            let (o, _) = apply_constant_b(&psi, [0.0, 0.0, b3], &params, model).unwrap();
            o.data.iter().zip(&base.data).map(|(a, b)| a - b).collect()
        };
        let d1 = diff(1e-3);
        let d2: Vec<Complex64> = diff(2e-3).iter().map(|v| v * 0.5).collect();
        let r = rel_diff(&d2, &d1);
        assert!(r < 1e-2, "{model:?}: {r}");
    }
}

#[test]
fn a_squared_term_matches_direct_sum() {
    // ħc[h³ Σ_{y≠x} μ²K₁(μr)/(2π² μr) a(y)² ψ(y) − hζ₁ a(x)² ψ(x)/(2π²)] by a naive double loop.
    let params = PhysicalParams::natural();
    let grid = Grid::open(8, 0.5).unwrap();
    let psi = Field::from_fn(grid, gaussian);
    let b = [0.1, -0.2, 0.3];
    let (_, br) = apply_constant_b(&psi, b, &params, MassModel::Scalar).unwrap();
    let h: f64 = 0.5;
    let n = grid.len();
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for x in 0..n {
        let px = grid.position(x);
        let ax = symmetric_gauge(px, b, &params);
        let mut acc = c(0.0, 0.0);
        for y in 0..n {
            if y == x {
                continue;
            }
            let py = grid.position(y);
            let r = ((px[0] - py[0]).powi(2) + (px[1] - py[1]).powi(2) + (px[2] - py[2]).powi(2)).sqrt();
            let ay = symmetric_gauge(py, b, &params);
            let a2 = ay[0] * ay[0] + ay[1] * ay[1] + ay[2] * ay[2];
            acc += psi.data[y] * (bessel_k(1, r).unwrap() / r * LEVY_NORMALIZATION * a2 * h.powi(3));
        }
        let a2x = ax[0] * ax[0] + ax[1] * ax[1] + ax[2] * ax[2];
        acc -= psi.data[x] * (h * ZETA_INV_R2 * LEVY_NORMALIZATION * a2x);
        worst = worst.max((acc - br.a_squared.data[x]).norm());
        peak = peak.max(acc.norm());
    }
    assert!(worst < 1e-8 * peak, "{worst} vs {peak}");
}

#[test]
fn assembly_reduces_to_free() {
    let params = PhysicalParams::natural();
    let grid = Grid::open(16, 0.5).unwrap();
    let psi = Field::from_fn(grid, gaussian);
    let input = AssemblyInput::from_fn(grid, |_| 1.0, |_| [0.0; 3], [0.0; 3]);
    let (out, ledger) = general_assembly(&input, &psi, &params).unwrap();
    let free = apply_free(&psi, &params).unwrap();
    let r = rel_diff(&out.data, &free.data);
    assert!(r < 1e-10, "{r}");
    assert_eq!(ledger.terms.len(), 10);
    assert!(ledger.get("T3_a_grad_w_K1").unwrap().max_re == 0.0);
}

#[test]
fn assembly_reduces_to_constant_a() {
    let params = PhysicalParams::natural();
    let grid = Grid::open(16, 0.5).unwrap();
    let psi = Field::from_fn(grid, gaussian);
    let a = [0.3, -0.1, 0.2];
    let input = AssemblyInput::from_fn(grid, |_| 1.0, |_| a, a);
    let (out, _) = general_assembly(&input, &psi, &params).unwrap();
    let want = apply_constant_a(&psi, a, &params).unwrap();
    let r = rel_diff(&out.data, &want.data);
    assert!(r < 1e-10, "{r}");
}

#[test]
fn assembly_reduces_to_constant_b() {
    let params = PhysicalParams::natural();
    let grid = Grid::open(16, 0.5).unwrap();
    let psi = Field::from_fn(grid, |x| gaussian(x) * c(1.0, 0.3 * x[1]));
    let b = [0.2, -0.1, 0.4];
    let input = AssemblyInput::from_fn(grid, |_| 1.0, |y| symmetric_gauge(y, b, &params), [0.0; 3]);
    let (out, ledger) = general_assembly(&input, &psi, &params).unwrap();
    let (want, br) = apply_constant_b(&psi, b, &params, MassModel::Scalar).unwrap();
    let r = rel_diff(&out.data, &want.data);
    assert!(r < 1e-8, "{r}");
    // The odd (a·z)K₂ term is the one carrying an imaginary part for real ψ-profiles.
    assert!(ledger.get("T4_a_grad_u_K2").unwrap().max_im > 0.0);
    assert!(br.magnitudes[2].1 > 0.0);
}

#[test]
fn assembly_rejects_bad_input() {
    let params = PhysicalParams::natural();
    let grid = Grid::open(6, 0.5).unwrap();
    let psi = Field::from_fn(grid, gaussian);
    let input = AssemblyInput::from_fn(grid, |x| if x[0] > 0.5 { -1.0 } else { 1.0 }, |_| [0.0; 3], [0.0; 3]);
    assert!(matches!(general_assembly(&input, &psi, &params), Err(sqrtop::Error::Domain(_))));
    let other = Field::from_fn(Grid::open(8, 0.5).unwrap(), gaussian);
    let input = AssemblyInput::from_fn(grid, |_| 1.0, |_| [0.0; 3], [0.0; 3]);
    assert!(matches!(general_assembly(&input, &other, &params), Err(sqrtop::Error::Usage(_))));
    let mu = Field::from_fn(grid, |_| c(1.0, 0.0));
    let a = [0, 1, 2].map(|_| Field::from_fn(Grid::open(8, 0.5).unwrap(), |_| c(0.0, 0.0)));
    assert!(AssemblyInput::from_fields(&mu, &a, [0.0; 3]).is_err());
}

#[test]
fn variable_mass_output_is_finite_and_real() {
    // Smooth positive μ(y) and no potential: a real input gives a real output.
    let params = PhysicalParams::natural();
    let grid = Grid::open(8, 0.5).unwrap();
    let psi = Field::from_fn(grid, gaussian);
    let input = AssemblyInput::from_fn(grid, |y| 1.0 + 0.1 * (-(y[0] * y[0]) / 4.0).exp(), |_| [0.0; 3], [0.0; 3]);
    let (out, _) = general_assembly(&input, &psi, &params).unwrap();
    assert!(out.data.iter().all(|v| v.re.is_finite() && v.im.abs() < 1e-12));
}
