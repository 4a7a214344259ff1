//! Run configuration read from a TOML file. Command-line flags override file values, which
//! override the defaults below.

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::suites::Tolerances;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Point counts: `[n]` or `[nx, ny, nz]` for field grids, `[n_ct, n_r]` for z-kernel tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub fields: FieldPaths,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub tabulate: TabulateConfig,
    #[serde(default)]
    pub apply: ApplyConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub m: f64,
    pub c: f64,
    pub hbar: f64,
    pub e: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            m: 1.0,
            c: 1.0,
            hbar: 1.0,
            e: 1.0,
        }
    }
}

impl ParamsConfig {
    pub fn physical(&self) -> Result<PhysicalParams> {
        if *self == ParamsConfig::default() {
            return Ok(PhysicalParams::natural());
        }
        PhysicalParams::new(self.m, self.c, self.hbar, self.e).map_err(|e| Error::usage(e.to_string()))
    }

    /// Apply `m=..,c=..,hbar=..,e=..` (any subset).
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("parameter '{part}' is not NAME=VALUE")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::usage(format!("parameter {k} has non-numeric value '{v}'")))?;
            match k.trim() {
                "m" => self.m = v,
                "c" => self.c = v,
                "hbar" => self.hbar = v,
                "e" => self.e = v,
                other => return Err(Error::usage(format!("unknown parameter '{other}' (expected m, c, hbar, e)"))),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FieldPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TabulateConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub ct_min: f64,
    pub ct_max: f64,
    pub ct_points: usize,
    /// Imaginary time of the heat kernel.
    pub t: f64,
    /// Vector potential for constant-A.
    pub a: [f64; 3],
    /// Magnetic field for constant-B.
    pub b: [f64; 3],
    /// Ray direction for the constant-A and constant-B profiles.
    pub direction: [f64; 3],
}

impl Default for TabulateConfig {
    fn default() -> Self {
        TabulateConfig {
            kind: None,
            r_min: 0.01,
            r_max: 10.0,
            points: 200,
            ct_min: -3.0,
            ct_max: 3.0,
            ct_points: 61,
            t: 1.0,
            a: [0.0; 3],
            b: [0.0; 3],
            direction: [1.0, 0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApplyConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    pub t: f64,
    pub a: [f64; 3],
    pub b: [f64; 3],
    /// scalar, verbatim or hermitian
    pub mass_model: String,
}

impl Default for ApplyConfig {
    fn default() -> Self {
        ApplyConfig {
            operator: None,
            t: 0.0,
            a: [0.0; 3],
            b: [0.0; 3],
            mass_model: "scalar".into(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::usage(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::usage(format!("config serialisation: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        Tolerances::from_map(&self.tolerances)?;
        self.params.physical()?;
        if let Some(g) = &self.grid {
            if g.is_empty() || g.len() > 3 || g.contains(&0) {
                return Err(Error::usage("grid needs one to three positive point counts"));
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        Tolerances::from_map(&self.tolerances)
    }
}
