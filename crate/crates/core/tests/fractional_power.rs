use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqrtop::fractional::*;
use sqrtop::linalg::{c, fro, hermitian_eigen, CMatrix, CVector};
use sqrtop::quad::{integrate_to_infinity, QuadOptions};

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), 0.0));
    m.transpose() * &m + CMatrix::identity(n, n)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Eigendecomposition oracle for f(P) with P Hermitian.
fn hermitian_fn(p: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(p);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(vals.len(), vals.iter().map(|&l| c(f(l), 0.0))));
    &vecs * d * vecs.adjoint()
}

#[test]
fn density_integrates_to_one_and_laplace() {
    for &t in &[0.3, 1.0, 2.5] {
        let total = integrate_to_infinity(
            |s: f64| subordination_density(t, s).unwrap_or(0.0),
            &[0.0, t * t / 6.0],
            QuadOptions::rel(1e-11),
        )
        .unwrap();
        assert!((total.value - 1.0).abs() < 1e-8, "t={t}: {}", total.value);
    }
    let lap = integrate_to_infinity(
        |s: f64| subordination_density(1.0, s).unwrap_or(0.0) * (-s).exp(),
        &[0.0, 1.0 / 6.0],
        QuadOptions::rel(1e-11),
    )
    .unwrap();
    assert!((lap.value - (-1.0f64).exp()).abs() < 1e-9);
}

#[test]
fn bromwich_residuals() {
    for &t in &[0.2, 1.0, 2.0, 5.0] {
        for &s in &[0.2, 0.5, 1.0, 5.0] {
            let r = density_bromwich_check(t, s).unwrap();
            assert!(r.abs() < 1e-6, "t={t} s={s} residual {r}");
        }
    }
}

#[test]
fn balakrishnan_matches_eigen_sqrt() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..6 {
        let n = 2 + trial * 2;
        let p = random_spd(&mut rng, n);
        let sg = MatrixSemigroup::new(-&p).unwrap();
        let v = random_vec(&mut rng, n);
        let got = balakrishnan_sqrt_apply(&sg, &v).unwrap().value;
        let want = hermitian_fn(&p, f64::sqrt) * &v;
        assert!((&got - &want).norm() < 1e-6 * want.norm());
    }
}

#[test]
fn balakrishnan_trivial_cases() {
    let sg = MatrixSemigroup::from_real_diagonal(&[-1.0, -4.0]).unwrap();
    let v = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
    let r = balakrishnan_sqrt_apply(&sg, &v).unwrap().value;
    assert!((r[0] - c(1.0, 0.0)).norm() < 1e-8 && (r[1] - c(2.0, 0.0)).norm() < 1e-8);
    let bad = MatrixSemigroup::from_real_diagonal(&[1.0, -1.0]).unwrap();
    assert!(balakrishnan_sqrt_apply(&bad, &v).is_err());
}

#[test]
fn subordination_is_exp_of_sqrt_and_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = random_spd(&mut rng, 6);
    let sg = MatrixSemigroup::new(-&p).unwrap();
    let v = random_vec(&mut rng, 6);
    let want = hermitian_fn(&p, |l| (-l.sqrt()).exp()) * &v;
    let got = subordinate_apply(&sg, 1.0, &v).unwrap().value;
    assert!((&got - &want).norm() < 1e-6 * want.norm());
    let twice = subordinate_apply(&sg, 1.0, &got).unwrap().value;
    let two = subordinate_apply(&sg, 2.0, &v).unwrap().value;
    assert!((&twice - &two).norm() < 1e-6 * two.norm());
    assert_eq!(subordinate_apply(&sg, 0.0, &v).unwrap().value, v);
}

#[test]
fn resolvent_complex_lambda() {
    let sg = MatrixSemigroup::from_real_diagonal(&[-1.0, -2.0]).unwrap();
    let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let r = resolvent_from_semigroup(&sg, c(1.0, 1.0), &v).unwrap();
    assert!((r.value[0] - c(0.4, -0.2)).norm() < 1e-8);
    assert!(r.value[1].norm() < 1e-12);
    assert!(r.bound_satisfied);
    // λ R(λ) v → v as λ grows.
    let id = MatrixSemigroup::from_real_diagonal(&[-1.0, -1.0]).unwrap();
    let big = resolvent_from_semigroup(&id, c(1e4, 0.0), &v).unwrap();
    assert!((big.value[0] * 1e4 - c(1.0, 0.0)).norm() < 1e-3);
}

#[test]
fn semigroup_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_spd(&mut rng, 5);
    let sg = MatrixSemigroup::new(-&p).unwrap();
    let v = random_vec(&mut rng, 5);
    let a = sg.semigroup_apply(0.7, &sg.semigroup_apply(0.4, &v));
    let b = sg.semigroup_apply(1.1, &v);
    assert!((&a - &b).norm() < 1e-10 * b.norm());
    let h = 1e-6;
    let fd = (sg.semigroup_apply(h, &v) - sg.semigroup_apply(0.0, &v)) / Complex64::new(h, 0.0);
    let av = sg.generator_apply(&v);
    assert!((fd - &av).norm() < 1e-4 * av.norm());
}

#[test]
fn holomorphy_constant_is_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = random_spd(&mut rng, 8);
    let samples: Vec<(f64, f64)> = [0.1, 1.0, 10.0]
        .iter()
        .flat_map(|&r| [-20.0, -1.0, 0.5, 3.0, 50.0].map(move |s| (r, s)))
        .collect();
    let ms = holomorphy_constants(&-&p, &samples).unwrap();
    let max = ms.iter().cloned().fold(0.0, f64::max);
    // Normal generator with real negative spectrum: the constant is at most 1.
    assert!(max <= 1.0 + 1e-12 && max > 0.5);
    let _ = fro(&p);
}
