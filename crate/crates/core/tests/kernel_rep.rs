use approx::assert_relative_eq;
use num_complex::Complex64;
use sqrtop::field::{Field, Grid};
use sqrtop::kernel::{
    self, apply_constant_a, apply_free, apply_free_radial, free_effective_kernel, free_profile, imaginary_term_limit,
    levy_density, resolvent_kernel_identity, spectral_density_identity, Regime, LEVY_NORMALIZATION, ZETA_INV_R2,
    ZETA_X2Y2, ZETA_X4,
};
use sqrtop::params::PhysicalParams;
use sqrtop::quad::{integrate_to_infinity, QuadOptions};
use sqrtop::special::bessel_k;
use sqrtop::spectral::{apply_spectral, radial_apply_spectral};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian(x: [f64; 3], s: f64) -> Complex64 {
    c((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * s * s)).exp(), 0.0)
}

#[test]
fn levy_normalization() {
    // 4π ∫ r² K₂(μr)μ²/r² (1 − sin kr/(kr)) dr against √(k²+μ²) − μ, solved for the prefactor.
    for mu in [0.5, 1.0, 2.0] {
        for k in [0.3, 1.0, 4.0] {
            let q = integrate_to_infinity(
                |r: f64| {
                    let kr = k * r;
                    let damp = if kr < 1e-3 { kr * kr / 6.0 - kr.powi(4) / 120.0 } else { 1.0 - kr.sin() / kr };
                    4.0 * PI * mu * mu * bessel_k(2, mu * r).unwrap() * damp
                },
                &[0.0, 1.0 / mu, 5.0 / mu],
                QuadOptions::rel(1e-12),
            )
            .unwrap();
            let sigma = ((k * k + mu * mu).sqrt() - mu) / q.value;
            assert_relative_eq!(sigma, LEVY_NORMALIZATION, max_relative = 1e-9);
        }
    }
    // The factor between a 2/π² prefactor and the symbol-fixed one.
    assert_relative_eq!((2.0 / (PI * PI)) / LEVY_NORMALIZATION, 4.0, max_relative = 1e-15);
    assert_relative_eq!(levy_density(1.0, 1.0), bessel_k(2, 1.0).unwrap() / (2.0 * PI * PI), max_relative = 1e-14);
}

/// Σ' f(n) − ∫ f, regulated by e^{−ε|n|²} and extrapolated linearly to ε = 0.
fn regularised_sum(f: impl Fn(i64, i64, i64) -> f64, degree: f64, angular_mean: f64) -> f64 {
    let m = 90i64;
    let z = |eps: f64| {
        // Neumaier-compensated over ~6e6 terms.
        let (mut s, mut comp) = (0.0f64, 0.0f64);
        for i in -m..=m {
            for j in -m..=m {
                for k in -m..=m {
                    let n2 = i * i + j * j + k * k;
                    if n2 > 0 {
                        let v = f(i, j, k) * (-eps * n2 as f64).exp();
                        let t = s + v;
                        comp += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
                        s = t;
                    }
                }
            }
        }
        let s = s + comp;
        let g = libm_gamma((degree + 3.0) / 2.0);
        s - angular_mean * 4.0 * PI * 0.5 * g * eps.powf(-(degree + 3.0) / 2.0)
    };
    2.0 * z(0.005) - z(0.01)
}

/// Γ at the two half-integer/integer points needed here.
fn libm_gamma(x: f64) -> f64 {
    if (x - 0.5).abs() < 1e-12 {
        PI.sqrt()
    } else if (x - 1.5).abs() < 1e-12 {
        0.5 * PI.sqrt()
    } else {
        panic!("unsupported argument {x}")
    }
}

#[test]
fn lattice_constants() {
    let r2 = |i: i64, j: i64, k: i64| (i * i + j * j + k * k) as f64;
    let z1 = regularised_sum(|i, j, k| 1.0 / r2(i, j, k), -2.0, 1.0);
    let z4 = regularised_sum(|i, j, k| (i as f64).powi(4) / r2(i, j, k).powi(2), 0.0, 0.2);
    let z22 = regularised_sum(|i, j, k| (i * i * j * j) as f64 / r2(i, j, k).powi(2), 0.0, 1.0 / 15.0);
    assert!((z1 - ZETA_INV_R2).abs() < 1e-9, "{z1}");
    assert!((z4 - ZETA_X4).abs() < 1e-9, "{z4}");
    assert!((z22 - ZETA_X2Y2).abs() < 1e-9, "{z22}");
    // Cubic symmetry: Σ (x⁴ + 2x²y² ...)/r⁴ = Σ 1, whose regularised value is −1.
    assert!((3.0 * z4 + 6.0 * z22 + 1.0).abs() < 1e-9);
}

#[test]
fn identity_examples() {
    let r = resolvent_kernel_identity(1.0, 1.0, 0.0).unwrap();
    assert_relative_eq!(r.rhs, (-1.0f64).exp() / (4.0 * PI), max_relative = 1e-14);
    assert!(r.residual < 1e-8);
    let r = resolvent_kernel_identity(1.0, 1.0, 3.0).unwrap();
    assert_relative_eq!(r.lhs, 0.0107696, max_relative = 1e-5);
    assert!(r.residual < 1e-8);
    // Dimensionless collapse: lhs(μ, r, λ) = μ · lhs(1, μr, λ/μ²).
    let a = resolvent_kernel_identity(2.0, 0.7, 1.2).unwrap();
    let b = resolvent_kernel_identity(1.0, 1.4, 0.3).unwrap();
    assert_relative_eq!(a.lhs, 2.0 * b.lhs, max_relative = 1e-8);
    let s = spectral_density_identity(1.0, 1.0).unwrap();
    assert_relative_eq!(s.lhs, 1.2038145, max_relative = 1e-6);
    assert!(s.residual < 1e-6);
    let s = spectral_density_identity(2.0, 0.5).unwrap();
    assert_relative_eq!(s.rhs, 4.8152578, max_relative = 1e-7);
    assert!(s.residual < 1e-6);
}

#[test]
fn effective_kernel_examples() {
    assert_relative_eq!(free_effective_kernel(1.0, 1.0).unwrap(), 1.6248389, max_relative = 1e-7);
    assert_relative_eq!(
        free_effective_kernel(1.0, 10.0).unwrap(),
        bessel_k(2, 10.0).unwrap() / 100.0,
        max_relative = 1e-12
    );
    let r = 1e-3;
    assert!((free_effective_kernel(1.0, r).unwrap() * r.powi(4) - 2.0).abs() < 1e-2);
    assert!(free_effective_kernel(1.0, 0.0).is_err());
    let rs: Vec<f64> = (0..400).map(|i| 0.01 * 1.02f64.powi(i)).filter(|r| *r <= 10.0).collect();
    let p = free_profile(1.0, &rs).unwrap();
    assert!(p.asymptotic_monotone());
    for (r, reg) in p.r.iter().zip(&p.regimes) {
        let want = if *r <= 0.1 {
            Regime::Singular
        } else if *r <= 3.0 {
            Regime::Compton
        } else {
            Regime::Asymptotic
        };
        assert_eq!(*reg, want);
    }
    // With the −μ² weighting the K₀ part dominates K₁/u once μr ≥ 3.
    for r in p.r.iter().filter(|r| **r >= 3.0) {
        assert!(bessel_k(0, *r).unwrap() > bessel_k(1, *r).unwrap() / r);
    }
}

#[test]
fn radial_free_matches_spectral_oracle() {
    let params = PhysicalParams::natural();
    for s in [0.5, 1.0, 2.0] {
        let h = 0.02 * s;
        let grid = Grid::radial((14.0 * s / h) as usize, h).unwrap();
        let psi = Field::from_fn(grid, |x| gaussian(x, s));
        let got = apply_free_radial(&psi, &params).unwrap();
        let want = radial_apply_spectral(&psi, &params).unwrap();
        let err = got.field.rel_l2_error(&want.field).unwrap();
        assert!(err < 1e-3, "σ = {s}: {err}");
        assert!(got.error_estimate < 1e-3);
    }
}

#[test]
fn radial_constant_is_rest_energy() {
    let params = PhysicalParams::with_mass(1.7);
    let grid = Grid::radial(200, 0.05).unwrap();
    let psi = Field::from_fn(grid, |_| c(1.0, 0.0));
    let out = apply_free(&psi, &params).unwrap();
    for v in &out.data {
        assert!((v - c(1.7, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn coarse_radial_grid_is_rejected() {
    let grid = Grid::radial(40, 0.5).unwrap();
    let psi = Field::from_fn(grid, |x| gaussian(x, 0.3));
    assert!(matches!(
        apply_free_radial(&psi, &PhysicalParams::natural()),
        Err(sqrtop::Error::Accuracy { .. })
    ));
}

#[test]
fn periodic_constant_is_rest_energy() {
    for m in [0.5, 1.0, 2.0] {
        let params = PhysicalParams::with_mass(m);
        let grid = Grid::periodic(8, 0.5).unwrap();
        let psi = Field::from_fn(grid, |_| c(1.0, 0.0));
        let out = apply_free(&psi, &params).unwrap();
        for v in &out.data {
            assert!((v - c(m, 0.0)).norm() < 1e-12 * m, "{v}");
        }
    }
}

#[test]
fn periodic_symbol_up_to_half_nyquist() {
    let params = PhysicalParams::natural();
    let n = 16;
    let h = 0.5;
    let grid = Grid::periodic(n, h).unwrap();
    let l = n as f64 * h;
    let mut worst = 0.0f64;
    let half_nyquist = PI / (2.0 * h);
    let mut tested = 0;
    for (i, j, k) in [(0, 0, 0), (1, 0, 0), (2, 1, 0), (3, 2, 1), (4, 0, 0), (2, 2, 2), (3, 3, 0), (4, 4, 0)] {
        let kv = [i as f64, j as f64, k as f64].map(|v| 2.0 * PI * v / l);
        if kv.iter().map(|v| v * v).sum::<f64>().sqrt() > half_nyquist + 1e-12 {
            continue;
        }
        tested += 1;
        let psi = Field::from_fn(grid, |x| sqrtop::spectral::phase(kv[0] * x[0] + kv[1] * x[1] + kv[2] * x[2]));
        let out = apply_free(&psi, &params).unwrap();
        let want = (kv.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt();
        for (o, p) in out.data.iter().zip(&psi.data) {
            worst = worst.max((o / p - want).norm() / want);
        }
    }
    assert!(tested >= 6);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn open_grid_matches_spectral_oracle() {
    let params = PhysicalParams::natural();
    let psi = Field::from_fn(Grid::open(24, 0.5).unwrap(), |x| gaussian(x, 1.2));
    let oracle_in = Field::from_fn(Grid::periodic(24, 0.5).unwrap(), |x| gaussian(x, 1.2));
    let got = apply_free(&psi, &params).unwrap();
    let want = apply_spectral(&oracle_in, &params, None).unwrap();
    let got = Field::new(oracle_in.grid, 1, got.data).unwrap();
    let err = got.rel_l2_error(&want).unwrap();
    assert!(err < 1e-3, "{err}");
}

#[test]
fn constant_a_is_gauge_covariant() {
    let params = PhysicalParams::natural();
    let grid = Grid::periodic(24, 0.5).unwrap();
    let psi = Field::from_fn(grid, |x| gaussian(x, 1.2));
    for a in [0.1, 0.3, 0.6] {
        let got = apply_constant_a(&psi, [a, 0.0, 0.0], &params).unwrap();
        let want = apply_spectral(&psi, &params, Some([a, 0.0, 0.0])).unwrap();
        let err = got.rel_l2_error(&want).unwrap();
        assert!(err < 1e-3, "a = {a}: {err}");
    }
}

#[test]
fn constant_a_reductions() {
    let params = PhysicalParams::natural();
    let grid = Grid::open(10, 0.5).unwrap();
    let psi = Field::from_fn(grid, |x| gaussian(x, 1.0));
    let free = apply_free(&psi, &params).unwrap();
    let zero = apply_constant_a(&psi, [0.0; 3], &params).unwrap();
    assert_eq!(free.data, zero.data);
    // Gauge-shifted zero mode on a periodic grid with a commensurate a.
    let grid = Grid::periodic(8, 0.5).unwrap();
    let a = [2.0 * PI / 4.0, 0.0, 0.0];
    let mode = Field::from_fn(grid, |x| sqrtop::spectral::phase(a[0] * x[0]));
    let out = apply_constant_a(&mode, a, &params).unwrap();
    for (o, p) in out.data.iter().zip(&mode.data) {
        assert!((o - p).norm() < 1e-12);
    }
}

#[test]
fn imaginary_term_limit_properties() {
    assert_eq!(imaginary_term_limit([0.0; 3], 1.0).unwrap(), c(0.0, 0.0));
    let base = imaginary_term_limit([0.3, 0.1, -0.2], 1.3).unwrap();
    let doubled = imaginary_term_limit([0.6, 0.2, -0.4], 1.3).unwrap();
    assert_relative_eq!(doubled.re / base.re, 4.0, max_relative = 1e-14);
    // Rotation invariance: same |a| in another direction.
    let n = (0.09f64 + 0.01 + 0.04).sqrt();
    let rotated = imaginary_term_limit([0.0, 0.0, n], 1.3).unwrap();
    assert_relative_eq!(rotated.re, base.re, max_relative = 1e-14);
    // Oracle: angular quadrature of e^{ia·z}(ia·z)K₂(μr) at small r, by Gauss–Legendre in cos θ.
    let (a, mu, r) = (0.7, 1.3, 1e-4);
    let (x, w) = sqrtop::quad::gauss_legendre(40);
    let mut acc = c(0.0, 0.0);
    for (ct, wt) in x.iter().zip(&w) {
        let az = a * r * ct;
        acc += sqrtop::spectral::phase(az) * c(0.0, az) * (2.0 * PI * wt);
    }
    acc *= bessel_k(2, mu * r).unwrap();
    let lim = imaginary_term_limit([a, 0.0, 0.0], mu).unwrap();
    assert!((acc - lim).norm() < 1e-6 * lim.norm(), "{acc} vs {lim}");
}

#[test]
fn compton_locality() {
    // ψ supported in a ball of radius R; output far away decays like e^{−μd} times a power.
    let mu = 1.0;
    let params = PhysicalParams::with_mass(mu);
    let grid = Grid::open(48, 0.5).unwrap();
    let rad = 2.0;
    // Smooth bump so the spectral near-cell correction does not ring.
    let psi = Field::from_fn(grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if r2 < rad * rad {
            c((-1.0 / (1.0 - r2 / (rad * rad))).exp(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let out = apply_free(&psi, &params).unwrap();
    let (mut ds, mut logs) = (Vec::new(), Vec::new());
    for i in 0..grid.len() {
        let x = grid.position(i);
        if x[1] == 0.0 && x[2] == 0.0 && x[0] > rad + 5.0 / mu {
            ds.push(x[0]);
            logs.push(out.data[i].norm().ln());
        }
    }
    // Least squares on log|out| = c − λd − p log d.
    let rate = fit_rate(&ds, &logs);
    assert!((rate - mu).abs() < 0.1 * mu, "{rate}");
}

fn fit_rate(d: &[f64], y: &[f64]) -> f64 {
    let rows: Vec<[f64; 3]> = d.iter().map(|&d| [1.0, -d, -d.ln()]).collect();
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (r, v) in rows.iter().zip(y) {
        for i in 0..3 {
            aty[i] += r[i] * v;
            for j in 0..3 {
                ata[(i, j)] += r[i] * r[j];
            }
        }
    }
    ata.lu().solve(&aty).unwrap()[1]
}

#[test]
fn counterterm_keeps_constant_exact() {
    // Without the counterterm the diagonal weight alone grows like 1/h under refinement.
    let params = PhysicalParams::natural();
    let mut last = 0.0;
    for h in [0.5, 0.25, 0.125] {
        let w = kernel::lattice::lattice_total_weight(c(1.0, 0.0), h).unwrap().re;
        assert!(w > 1.8 * last);
        last = w;
        let grid = Grid::periodic(8, h).unwrap();
        let one = Field::from_fn(grid, |_| c(1.0, 0.0));
        let out = apply_free(&one, &params).unwrap();
        assert!(out.data.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-12));
    }
}
