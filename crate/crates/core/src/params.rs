use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which unit convention a parameter set was written in. Formulas keep every constant
/// explicit, so the flag is informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Natural,
    Custom,
}

/// Mass, speed of light, reduced Planck constant and charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub m: f64,
    pub c: f64,
    pub hbar: f64,
    pub e: f64,
    #[serde(default)]
    pub units: UnitSystem,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams::natural()
    }
}

impl PhysicalParams {
    /// ħ = c = m = e = 1.
    pub fn natural() -> Self {
        PhysicalParams {
            m: 1.0,
            c: 1.0,
            hbar: 1.0,
            e: 1.0,
            units: UnitSystem::Natural,
        }
    }

    pub fn new(m: f64, c: f64, hbar: f64, e: f64) -> Result<Self> {
        let p = PhysicalParams {
            m,
            c,
            hbar,
            e,
            units: UnitSystem::Custom,
        };
        p.validate()?;
        Ok(p)
    }

    /// Natural units with a chosen mass.
    pub fn with_mass(m: f64) -> Self {
        PhysicalParams {
            m,
            ..PhysicalParams::natural()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.m, self.c, self.hbar, self.e].iter().all(|v| v.is_finite());
        if !finite || self.m < 0.0 || self.c <= 0.0 || self.hbar <= 0.0 {
            return Err(Error::domain(format!(
                "need m >= 0, c > 0, hbar > 0 (got m={}, c={}, hbar={}, e={})",
                self.m, self.c, self.hbar, self.e
            )));
        }
        Ok(())
    }

    /// Inverse Compton length μ = mc/ħ.
    pub fn mu(&self) -> f64 {
        self.m * self.c / self.hbar
    }

    /// Rest energy mc².
    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// ħc, the energy·length scale multiplying the kernel.
    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }

    /// Wavevector shift a = eA/(ħc) produced by a vector potential A.
    pub fn gauge_wavevector(&self, a_pot: [f64; 3]) -> [f64; 3] {
        let s = self.e / (self.hbar * self.c);
        [a_pot[0] * s, a_pot[1] * s, a_pot[2] * s]
    }
}
