//! Dimensionless latex population balance, integrated along constant
//! characteristic curves (method of lines on a fixed uniform volume grid).
//!
//! The unknowns are the cluster distributions `m` (non-equilibrium) and `w`
//! (equilibrium) at nodes `φ_k = k h`, plus five scalar volumes. Transport uses
//! fourth-order differences, coagulation integrals use composite Simpson, and
//! time stepping is classical RK4.

pub mod aggregation;
pub mod coefficients;
pub mod quadrature;
pub mod rates;
mod solver;

pub use aggregation::{aggregation_terms, AggregationOperator, AggregationTerms, Phase};
pub use coefficients::LatexCoefficients;
pub use quadrature::{fd4_derivative, gaussian_delta, simpson_integral, simpson_weights};
pub use rates::{phi_and_vp, rate_functions, Auxiliaries, Rates};
pub use solver::{
    assemble_rhs, error_series, latex_scenario, simulate, simulate_from, PbeState, PbeSystem,
    Scenario, SimConfig, SimulationReport, Snapshot, TruncationEvent, TruncationPolicy,
    DIMENSIONAL_T_MAX, DIMENSIONAL_V_MAX, TRUNCATION_RATIO,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform volume grid `φ_k = k h`, `k = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    pub const MIN_N: usize = 8;

    /// `N` intervals covering `[0, v_max]`.
    pub fn new(n: usize, v_max: f64) -> Result<Self> {
        if n < Self::MIN_N {
            return Err(Error::Size(format!("grid needs N >= {}, got {n}", Self::MIN_N)));
        }
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(Error::domain(format!("v_max = {v_max} must be positive")));
        }
        Ok(Grid {
            n,
            h: v_max / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn v_max(&self) -> f64 {
        self.h * self.n as f64
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.node(k)).collect()
    }

    pub(crate) fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n + 1 {
            return Err(Error::Size(format!(
                "distribution has {} entries, grid has {}",
                v.len(),
                self.n + 1
            )));
        }
        Ok(())
    }
}
