//! Simulated annealing over `ρ = log10 θ`.
//!
//! Cooling is geometric, `T = T0 · 0.95^⌊k/L⌋` with `L = max_evaluations/100`
//! proposals per level. Proposals perturb every coordinate by a Gaussian of
//! width `step_scale · T/T0` decades. The best point ever evaluated is returned.

use super::{CostKind, ScalingProblem, ScalingSolution};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    pub max_evaluations: u64,
    pub initial_temperature: f64,
    pub seed: u64,
    /// Proposal width in decades at the initial temperature.
    pub step_scale: f64,
    /// Starting point in `log10 θ`; the origin when absent.
    pub initial_rho: Option<Vec<f64>>,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            max_evaluations: 100_000,
            initial_temperature: 1.0,
            seed: 0,
            step_scale: 1.0,
            initial_rho: None,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self, n_factors: usize) -> Result<()> {
        if self.max_evaluations == 0 {
            return Err(Error::domain("max_evaluations must be at least 1"));
        }
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::domain("initial_temperature must be positive"));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::domain("step_scale must be positive"));
        }
        if let Some(r) = &self.initial_rho {
            if r.len() != n_factors || r.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain("initial_rho must hold one finite value per factor"));
            }
        }
        Ok(())
    }
}

const COOLING: f64 = 0.95;
const LEVELS: u64 = 100;

/// Minimizes the chosen cost by annealing; deterministic for a given seed.
pub fn anneal_minimize(
    problem: &ScalingProblem,
    kind: CostKind,
    config: &AnnealConfig,
) -> Result<ScalingSolution> {
    let nx = problem.n_factors();
    config.validate(nx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut rho = config.initial_rho.clone().unwrap_or_else(|| vec![0.0; nx]);
    let mut cost = problem.cost_from_rho(&rho, kind);
    let mut best_rho = rho.clone();
    let mut best_cost = cost;

    let per_level = (config.max_evaluations / LEVELS).max(1);
    let t0 = config.initial_temperature;
    let mut trial = vec![0.0; nx];
    for k in 1..config.max_evaluations {
        let level = (k - 1) / per_level;
        let temp = t0 * COOLING.powi(level.min(i32::MAX as u64) as i32);
        let width = config.step_scale * temp / t0;
        for (t, r) in trial.iter_mut().zip(&rho) {
            let z: f64 = rng.sample(StandardNormal);
            *t = r + width * z;
        }
        let c = problem.cost_from_rho(&trial, kind);
        let delta = c - cost;
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp();
        if accept {
            rho.copy_from_slice(&trial);
            cost = c;
            if c < best_cost {
                best_cost = c;
                best_rho.copy_from_slice(&trial);
            }
        }
    }

    let theta = best_rho.iter().map(|r| 10f64.powf(*r)).collect();
    let tag = match kind {
        CostKind::Max => "anneal-max",
        CostKind::Euclid => "anneal-eucl",
    };
    problem.solution_at(theta, kind, tag)
}
