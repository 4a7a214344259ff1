//! Modified Bessel functions K₀..K₃ for real and complex argument, order-n Hankel
//! functions through the imaginary-axis continuation, and the elementary K_{1/2}.
//!
//! Evaluation uses the ascending series for |z| ≤ 2 and Steed's continued fraction
//! (CF2, Temme's normalisation) beyond. Orders 2 and 3 come from the upward recurrence
//! K_{n+1} = K_{n-1} + 2n K_n / z, which is stable for K. The scaled form e^z K_n(z) is the
//! internal representation throughout.

use crate::error::{Error, Result};
use nalgebra::ComplexField;
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;
const MAX_ITER: usize = 20_000;

/// Result of a single Bessel evaluation with both plain and scaled values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: u8,
    pub argument: Complex64,
    pub value: Complex64,
    /// value · e^{argument}
    pub scaled_value: Complex64,
}

/// e^z K₀(z), e^z K₁(z) from the ascending series (|z| ≤ 2).
fn series_k01<T: ComplexField<RealField = f64> + Copy>(z: T) -> (T, T) {
    let one = T::one();
    let half = T::from_real(0.5);
    let y = z * z * T::from_real(0.25);
    let lg = (z * half).ln() + T::from_real(EULER_GAMMA);
    // I0, I1 and the harmonic/digamma sums together.
    let mut term0 = one; // (y^k)/(k!)^2
    let mut i0 = one;
    let mut s0 = T::zero();
    let mut term1 = one; // (y^k)/(k!(k+1)!)
    let mut i1s = one;
    let mut s1 = T::from_real(1.0 - 2.0 * EULER_GAMMA); // ψ(1)+ψ(2) at k=0
    let mut harm = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        harm += 1.0 / kf;
        term0 = term0 * y * T::from_real(1.0 / (kf * kf));
        term1 = term1 * y * T::from_real(1.0 / (kf * (kf + 1.0)));
        i0 += term0;
        s0 += term0 * T::from_real(harm);
        i1s += term1;
        let psi_sum = -2.0 * EULER_GAMMA + 2.0 * harm + 1.0 / (kf + 1.0);
        s1 += term1 * T::from_real(psi_sum);
        if term0.modulus() < 1e-18 * i0.modulus() && term1.modulus() < 1e-18 * i1s.modulus() {
            break;
        }
    }
    let k0 = -lg * i0 + s0;
    let i1 = z * half * i1s;
    let k1 = one / z + (z * half).ln() * i1 - z * T::from_real(0.25) * s1;
    let e = z.exp();
    (k0 * e, k1 * e)
}

/// e^z K₀(z), e^z K₁(z) from Steed's continued fraction (|z| > 2).
fn cf2_k01<T: ComplexField<RealField = f64> + Copy>(z: T) -> Result<(T, T)> {
    let one = T::one();
    let two = T::from_real(2.0);
    let mut b = two * (one + z);
    let mut d = one / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = T::zero();
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = T::from_real(a1);
    let mut c = T::from_real(a1);
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 2..MAX_ITER {
        a -= 2.0 * (i - 1) as f64;
        c = -c * T::from_real(a / i as f64);
        let qnew = (q1 - b * q2) * T::from_real(1.0 / a);
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += two;
        d = one / (b + d * T::from_real(a));
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.modulus() < 1e-17 * s.modulus() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical("K continued fraction did not converge"));
    }
    h *= T::from_real(a1);
    let k0 = (T::from_real(PI) / (two * z)).sqrt() / s;
    let k1 = k0 * (z + T::from_real(0.5) - h) / z;
    Ok((k0, k1))
}

/// Scaled K₀..K₃ (each times e^z) for any supported argument.
fn scaled_all<T: ComplexField<RealField = f64> + Copy>(z: T) -> Result<[T; 4]> {
    let (k0, k1) = if z.modulus() <= SERIES_RADIUS {
        series_k01(z)
    } else {
        cf2_k01(z)?
    };
    let k2 = k0 + T::from_real(2.0) * k1 / z;
    let k3 = k1 + T::from_real(4.0) * k2 / z;
    Ok([k0, k1, k2, k3])
}

fn check_order(order: u32) -> Result<usize> {
    if order > 3 {
        Err(Error::domain(format!("Bessel order {order} outside 0..=3")))
    } else {
        Ok(order as usize)
    }
}

fn check_real(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("Bessel K needs a positive finite argument, got {u}")))
    }
}

/// e^u K₀(u)..e^u K₃(u) for real u > 0.
pub fn bessel_k_scaled_all(u: f64) -> Result<[f64; 4]> {
    check_real(u)?;
    scaled_all(u)
}

/// K₀(u)..K₃(u) for real u > 0.
pub fn bessel_k_all(u: f64) -> Result<[f64; 4]> {
    let s = bessel_k_scaled_all(u)?;
    let e = (-u).exp();
    Ok([s[0] * e, s[1] * e, s[2] * e, s[3] * e])
}

/// Kₙ(u), n ∈ 0..=3, u > 0.
pub fn bessel_k(order: u32, u: f64) -> Result<f64> {
    let n = check_order(order)?;
    Ok(bessel_k_all(u)?[n])
}

/// e^u Kₙ(u), accurate for u up to at least 1e4.
pub fn bessel_k_scaled(order: u32, u: f64) -> Result<f64> {
    let n = check_order(order)?;
    Ok(bessel_k_scaled_all(u)?[n])
}

fn check_complex(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        return Err(Error::Singularity("Bessel K is singular at z = 0".into()));
    }
    if z.re < 0.0 {
        return Err(Error::domain(format!(
            "Re z = {} < 0 lies across the branch cut",
            z.re
        )));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("non-finite complex argument"));
    }
    Ok(())
}

/// e^z K₀(z)..e^z K₃(z), principal branch, Re z ≥ 0, z ≠ 0.
pub fn bessel_k_complex_scaled_all(z: Complex64) -> Result<[Complex64; 4]> {
    check_complex(z)?;
    if z.im == 0.0 {
        let s = scaled_all(z.re)?;
        return Ok(s.map(|v| Complex64::new(v, 0.0)));
    }
    scaled_all(z)
}

/// K₀(z)..K₃(z), principal branch.
pub fn bessel_k_complex_all(z: Complex64) -> Result<[Complex64; 4]> {
    let s = bessel_k_complex_scaled_all(z)?;
    let e = (-z).exp();
    Ok(s.map(|v| v * e))
}

/// Kₙ(z) for complex z with Re z ≥ 0, z ≠ 0.
pub fn bessel_k_complex(order: u32, z: Complex64) -> Result<Complex64> {
    let n = check_order(order)?;
    Ok(bessel_k_complex_all(z)?[n])
}

/// Full evaluation record for one order and argument.
pub fn bessel_eval(order: u32, z: Complex64) -> Result<BesselEval> {
    let n = check_order(order)?;
    let s = bessel_k_complex_scaled_all(z)?[n];
    Ok(BesselEval {
        order: n as u8,
        argument: z,
        value: s * (-z).exp(),
        scaled_value: s,
    })
}

/// Hankel function H_n^{(kind)}(x), n ∈ 0..=3, from H_n^{(2)}(x) = (2/π) i^{n+1} K_n(ix)
/// and H^{(1)} = conj(H^{(2)}) on the real axis.
pub fn hankel(order: u32, kind: u32, x: f64) -> Result<Complex64> {
    let n = check_order(order)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("Hankel needs x > 0, got {x}")));
    }
    if kind != 1 && kind != 2 {
        return Err(Error::domain(format!("Hankel kind must be 1 or 2, got {kind}")));
    }
    let k = bessel_k_complex_all(Complex64::new(0.0, x))?[n];
    let phase = Complex64::i().powu(n as u32 + 1);
    let h2 = k * phase * (2.0 / PI);
    Ok(if kind == 2 { h2 } else { h2.conj() })
}

/// K_{1/2}(u) = √(π/2u) e^{-u}.
pub fn bessel_k_half(u: f64) -> Result<f64> {
    check_real(u)?;
    Ok((PI / (2.0 * u)).sqrt() * (-u).exp())
}
