//! Optimal scaling of physical equations and a population-balance solver for
//! latex particle morphology.
//!
//! The [`scaling`] module turns a table of monomial coefficients into scaling
//! factors, [`models`] builds the standard problems, [`ode`] integrates small
//! systems with fixed-step RK4, and [`pbe`] discretizes the dimensionless
//! population balance on a uniform volume grid.

pub mod cli;
pub mod config;
pub mod error;
pub mod linalg;
pub mod models;
pub mod ode;
pub mod output;
pub mod pbe;
pub mod scaling;

pub use error::{Error, Result};
