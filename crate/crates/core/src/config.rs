//! TOML run configuration.
//!
//! ```toml
//! [params.projectile]
//! v0 = 30.0
//!
//! [anneal]
//! max_evaluations = 20000
//!
//! [pbe]
//! theta = "eucl"
//! n = 400
//! steps = 4000
//! ```
//!
//! A `[problem]` table (`factors = [...]` plus `[[problem.monomials]]`) replaces
//! the preset problem of `scale` and `enumerate`. Unknown keys are rejected.

use crate::error::{Error, Result};
use crate::models::{LatexParams, LatexTheta, LdGParams, ProjectileParams, SchrodingerParams};
use crate::pbe::{LatexCoefficients, TruncationPolicy};
use crate::scaling::{AnnealConfig, ScalingProblem};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub projectile: ProjectileParams,
    pub schrodinger: SchrodingerParams,
    pub ldg: LdGParams,
    pub latex: LatexParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PbeSection {
    pub theta: Option<LatexTheta>,
    pub n: Option<usize>,
    pub steps: Option<usize>,
    pub sample_every: Option<usize>,
    pub t_max: Option<f64>,
    pub v_max: Option<f64>,
    pub sigma_ratio: Option<f64>,
    pub truncation: Option<TruncationPolicy>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectileSection {
    pub steps: Option<usize>,
    pub t_max: Option<f64>,
    pub x_max: Option<f64>,
    pub v_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<ScalingProblem>,
    pub params: ParamsSection,
    pub anneal: Option<AnnealConfig>,
    pub pbe: PbeSection,
    pub projectile: ProjectileSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.params.projectile.validate()?;
        cfg.params.schrodinger.validate()?;
        cfg.params.ldg.validate()?;
        cfg.params.latex.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// Explicit coefficient set for a latex run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaFile {
    pub coefficients: LatexCoefficients,
    /// Dimensionless `v_max` and `T_max`; the least-squares window when absent.
    #[serde(default)]
    pub window: Option<Window>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub v_max: f64,
    pub t_max: f64,
}

impl LambdaFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let lf: LambdaFile = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        lf.coefficients
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(lf)
    }
}
