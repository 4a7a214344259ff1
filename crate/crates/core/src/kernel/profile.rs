//! Tabulated kernels with regime labels and CSV export.

use crate::error::{Error, Result};
use crate::special::bessel_k_scaled_all;
use num_complex::Complex64;
use std::fmt::Write as _;

/// Separation class by μr.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// μr ≤ 0.1
    Singular,
    /// 0.1 < μr ≤ 3
    Compton,
    /// μr > 3
    Asymptotic,
}

impl Regime {
    pub fn classify(mu_r: f64) -> Regime {
        if mu_r <= 0.1 {
            Regime::Singular
        } else if mu_r <= 3.0 {
            Regime::Compton
        } else {
            Regime::Asymptotic
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::Singular => "singular",
            Regime::Compton => "compton",
            Regime::Asymptotic => "asymptotic",
        }
    }
}

/// Kernel values against separation.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    pub mu: f64,
    pub r: Vec<f64>,
    pub values: Vec<Complex64>,
    pub regimes: Vec<Regime>,
}

impl KernelProfile {
    pub fn new(mu: f64, r: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if r.len() != values.len() || r.is_empty() {
            return Err(Error::usage("profile needs matching, nonempty r and value lists"));
        }
        if let Some(bad) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::numerical(format!("kernel not finite at r = {}", r[bad])));
        }
        let regimes = r.iter().map(|&x| Regime::classify(mu * x)).collect();
        Ok(KernelProfile {
            mu,
            r,
            values,
            regimes,
        })
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// True when |value| decreases along the asymptotic samples.
    pub fn asymptotic_monotone(&self) -> bool {
        let tail: Vec<f64> = self
            .regimes
            .iter()
            .zip(&self.values)
            .filter(|(g, _)| **g == Regime::Asymptotic)
            .map(|(_, v)| v.norm())
            .collect();
        tail.windows(2).all(|w| w[1] < w[0])
    }

    /// CSV with `# key = value` header comments, then `r,value,regime` (real kernels) or
    /// `r,value_re,value_im,regime`.
    pub fn to_csv(&self, comments: &[(String, String)]) -> String {
        let mut s = String::new();
        for (k, v) in comments {
            writeln!(s, "# {k} = {v}").unwrap();
        }
        let real = self.is_real();
        s.push_str(if real { "r,value,regime\n" } else { "r,value_re,value_im,regime\n" });
        for ((r, v), g) in self.r.iter().zip(&self.values).zip(&self.regimes) {
            if real {
                writeln!(s, "{r:.10e},{:.16e},{}", v.re, g.label()).unwrap();
            } else {
                writeln!(s, "{r:.10e},{:.16e},{:.16e},{}", v.re, v.im, g.label()).unwrap();
            }
        }
        s
    }
}

/// K₀(μr)/r² + 2K₁(μr)/(μr³), equal to K₂(μr)/r² by the upward recurrence.
pub fn free_effective_kernel(mu: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("kernel needs r > 0, got {r}")));
    }
    if !(mu > 0.0) {
        return Err(Error::domain(format!("kernel needs μ > 0, got {mu}")));
    }
    let u = mu * r;
    let k = bessel_k_scaled_all(u)?;
    let e = (-u).exp();
    Ok(k[0] * e / (r * r) + 2.0 * k[1] * e / (mu * r * r * r))
}

/// Free effective kernel sampled at the given separations.
pub fn free_profile(mu: f64, r: &[f64]) -> Result<KernelProfile> {
    let values = r
        .iter()
        .map(|&x| free_effective_kernel(mu, x).map(|v| Complex64::new(v, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    KernelProfile::new(mu, r.to_vec(), values)
}
