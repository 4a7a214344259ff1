//! Adaptive Gauss–Kronrod quadrature over scalar, complex and vector-valued integrands,
//! plus fixed Gauss–Legendre rules.

use crate::error::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use std::collections::BinaryHeap;

/// Values that can be integrated: a vector space with a norm.
pub trait QuadValue: Clone {
    fn scaled(&self, w: f64) -> Self;
    fn add_assign_scaled(&mut self, other: &Self, w: f64);
    fn norm_value(&self) -> f64;
}

impl QuadValue for f64 {
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn add_assign_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn norm_value(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn add_assign_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn norm_value(&self) -> f64 {
        self.norm()
    }
}

impl QuadValue for DVector<Complex64> {
    fn scaled(&self, w: f64) -> Self {
        self * Complex64::new(w, 0.0)
    }
    fn add_assign_scaled(&mut self, other: &Self, w: f64) {
        self.axpy(Complex64::new(w, 0.0), other, Complex64::new(1.0, 0.0));
    }
    fn norm_value(&self) -> f64 {
        self.norm()
    }
}

impl QuadValue for DVector<f64> {
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn add_assign_scaled(&mut self, other: &Self, w: f64) {
        self.axpy(w, other, 1.0);
    }
    fn norm_value(&self) -> f64 {
        self.norm()
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc.scaled(WGK[7]);
    let mut gauss = fc.scaled(WG[3]);
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        kron.add_assign_scaled(&f1, WGK[j]);
        kron.add_assign_scaled(&f2, WGK[j]);
        if j % 2 == 1 {
            gauss.add_assign_scaled(&f1, WG[j / 2]);
            gauss.add_assign_scaled(&f2, WG[j / 2]);
        }
    }
    let kron = kron.scaled(h);
    let mut diff = gauss.scaled(h);
    diff.add_assign_scaled(&kron, -1.0);
    let err = diff.norm_value();
    (kron, err)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive G7–K15 integration of `f` over the listed breakpoints.
pub fn integrate_points<T, F>(mut f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if points.len() < 2 {
        return Err(Error::usage("integration needs at least two breakpoints"));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for w in points.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        evals += 15;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    loop {
        let (total, err) = sum_heap(&heap);
        let target = opts.abs_tol.max(opts.rel_tol * total.norm_value());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations: evals,
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Accuracy {
                message: format!("adaptive quadrature stopped after {} panels", heap.len()),
                estimate: err,
                tolerance: target,
            });
        }
        if !err.is_finite() {
            return Err(Error::numerical("integrand produced a non-finite value"));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Accuracy {
                message: "panel width reached machine precision".into(),
                estimate: err,
                tolerance: target,
            });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gk15(&mut f, a, b);
            evals += 15;
            heap.push(Panel {
                a,
                b,
                value: v,
                error: e,
            });
        }
    }
}

fn sum_heap<T: QuadValue>(heap: &BinaryHeap<Panel<T>>) -> (T, f64) {
    // Sum in interval order so results do not depend on heap layout.
    let mut panels: Vec<&Panel<T>> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut total = panels[0].value.scaled(0.0);
    let mut err = 0.0;
    for p in panels {
        total.add_assign_scaled(&p.value, 1.0);
        err += p.error;
    }
    (total, err)
}

/// Adaptive integration over the finite interval [a, b].
pub fn integrate<T, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_points(f, &[a, b], opts)
}

/// Integral over [a, ∞): finite panels on `breaks` (ascending, starting at a), then the tail
/// beyond the last break mapped to [0, 1) through s = last + (u/(1-u))², which keeps
/// algebraically decaying tails regular at u = 1.
pub fn integrate_to_infinity<T, F>(mut f: F, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let last = *breaks.last().ok_or_else(|| Error::usage("empty breakpoint list"))?;
    let tail = integrate_points(
        |u: f64| {
            let q = u / (1.0 - u);
            let s = last + q * q;
            let jac = 2.0 * u / (1.0 - u).powi(3);
            if !s.is_finite() || !jac.is_finite() {
                return f(last).scaled(0.0);
            }
            f(s).scaled(jac)
        },
        &[0.0, 1.0],
        opts,
    )?;
    if breaks.len() < 2 {
        return Ok(tail);
    }
    let head = integrate_points(&mut f, breaks, opts)?;
    let mut value = head.value;
    value.add_assign_scaled(&tail.value, 1.0);
    Ok(QuadResult {
        value,
        error: head.error + tail.error,
        evaluations: head.evaluations + tail.evaluations,
    })
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_tail() {
        let r = integrate_to_infinity(|x: f64| (-x * x).exp(), &[0.0, 1.0], QuadOptions::default())
            .unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_weights_sum() {
        let (x, w) = gauss_legendre(12);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-14);
    }
}
