//! Scaling problems: dimensionless coefficients written as monomials in the
//! scaling factors, plus the engines that choose those factors.
//!
//! Every coefficient has the shape `λ_i(θ) = κ_i · Π_j θ_j^{α_ij}`. Working with
//! `ρ_j = log10 θ_j` turns every question asked here into linear algebra on
//! the exponent table `α`, which is why the problem type stores nothing else.

mod anneal;
mod traditional;

pub use anneal::{anneal_minimize, AnnealConfig};
pub use traditional::{enumerate_traditional, solve_subset, Enumeration, DEFAULT_ENUMERATION_CAP};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, PIVOT_EPS};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

/// One dimensionless coefficient `κ · Π θ_j^{α_j}` with its target order of magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub label: String,
    pub kappa: f64,
    pub exponents: Vec<f64>,
    /// Desired `log10 λ`; zero means "order one".
    #[serde(default)]
    pub target: f64,
}

impl Monomial {
    pub fn new(label: impl Into<String>, kappa: f64, exponents: Vec<f64>) -> Self {
        Monomial {
            label: label.into(),
            kappa,
            exponents,
            target: 0.0,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = target;
        self
    }

    /// `log10 λ` at `ρ = log10 θ`.
    #[inline]
    pub fn log_value(&self, rho: &[f64]) -> f64 {
        self.kappa.log10()
            + self
                .exponents
                .iter()
                .zip(rho)
                .map(|(a, r)| a * r)
                .sum::<f64>()
    }
}

/// A validated set of monomials over named positive factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct ScalingProblem {
    factor_names: Vec<String>,
    monomials: Vec<Monomial>,
}

#[derive(Serialize, Deserialize)]
struct RawProblem {
    factors: Vec<String>,
    monomials: Vec<Monomial>,
}

impl TryFrom<RawProblem> for ScalingProblem {
    type Error = Error;
    fn try_from(raw: RawProblem) -> Result<Self> {
        ScalingProblem::new(raw.factors, raw.monomials)
    }
}

impl From<ScalingProblem> for RawProblem {
    fn from(p: ScalingProblem) -> Self {
        RawProblem {
            factors: p.factor_names,
            monomials: p.monomials,
        }
    }
}

/// Which distance between `log10 λ` and the targets is minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    /// Sum of squared log deviations.
    Euclid,
    /// Largest absolute log deviation.
    Max,
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostKind::Euclid => f.write_str("euclid"),
            CostKind::Max => f.write_str("max"),
        }
    }
}

impl ScalingProblem {
    pub fn new(factor_names: Vec<String>, monomials: Vec<Monomial>) -> Result<Self> {
        if factor_names.is_empty() {
            return Err(Error::domain("a scaling problem needs at least one factor"));
        }
        if monomials.is_empty() {
            return Err(Error::domain("a scaling problem needs at least one monomial"));
        }
        let mut seen = HashSet::new();
        for name in &factor_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::domain(format!("duplicate factor name {name:?}")));
            }
        }
        for m in &monomials {
            if !(m.kappa > 0.0 && m.kappa.is_finite()) {
                return Err(Error::domain(format!(
                    "monomial {:?} has non-positive kappa {}",
                    m.label, m.kappa
                )));
            }
            if m.exponents.len() != factor_names.len() {
                return Err(Error::domain(format!(
                    "monomial {:?} has {} exponents for {} factors",
                    m.label,
                    m.exponents.len(),
                    factor_names.len()
                )));
            }
            if m.exponents.iter().any(|a| !a.is_finite()) || !m.target.is_finite() {
                return Err(Error::domain(format!("monomial {:?} is not finite", m.label)));
            }
        }
        Ok(ScalingProblem {
            factor_names,
            monomials,
        })
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial(&self, label: &str) -> Option<(usize, &Monomial)> {
        self.monomials.iter().enumerate().find(|(_, m)| m.label == label)
    }

    /// Number of factors `N_x`.
    pub fn n_factors(&self) -> usize {
        self.factor_names.len()
    }

    /// Number of coefficients `N_d`.
    pub fn n_coefficients(&self) -> usize {
        self.monomials.len()
    }

    /// Replaces every target; `targets.len()` must equal `N_d`.
    pub fn with_targets(mut self, targets: &[f64]) -> Result<Self> {
        if targets.len() != self.monomials.len() {
            return Err(Error::domain("target vector length differs from monomial count"));
        }
        for (m, t) in self.monomials.iter_mut().zip(targets) {
            m.target = *t;
        }
        Ok(self)
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_factors() {
            return Err(Error::domain(format!(
                "expected {} factors, got {}",
                self.n_factors(),
                theta.len()
            )));
        }
        if let Some((j, t)) = theta
            .iter()
            .enumerate()
            .find(|(_, t)| !(**t > 0.0 && t.is_finite()))
        {
            return Err(Error::domain(format!(
                "factor {} = {t} is not strictly positive",
                self.factor_names[j]
            )));
        }
        Ok(())
    }

    /// `λ_i = κ_i Π_j θ_j^{α_ij}`.
    pub fn eval_coefficients(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        Ok(self
            .monomials
            .iter()
            .map(|m| {
                m.exponents
                    .iter()
                    .zip(theta)
                    .fold(m.kappa, |acc, (a, t)| acc * t.powf(*a))
            })
            .collect())
    }

    /// `log10 λ_i` at `ρ = log10 θ`; total in ρ, so annealing can search unconstrained.
    pub fn log_coefficients(&self, rho: &[f64]) -> Vec<f64> {
        self.monomials.iter().map(|m| m.log_value(rho)).collect()
    }

    pub(crate) fn cost_from_rho(&self, rho: &[f64], kind: CostKind) -> f64 {
        let dev = self.monomials.iter().map(|m| m.log_value(rho) - m.target);
        match kind {
            CostKind::Euclid => dev.map(|d| d * d).sum(),
            CostKind::Max => dev.map(f64::abs).fold(0.0, f64::max),
        }
    }

    /// Cost of a factor choice under `kind`.
    pub fn evaluate_cost(&self, theta: &[f64], kind: CostKind) -> Result<f64> {
        let lambdas = self.eval_coefficients(theta)?;
        Ok(cost_of_lambdas(&self.monomials, &lambdas, kind))
    }

    /// Gradient of the Euclidean cost with respect to θ.
    pub fn euclid_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let lambdas = self.eval_coefficients(theta)?;
        let ln10 = std::f64::consts::LN_10;
        Ok((0..self.n_factors())
            .map(|j| {
                let s: f64 = self
                    .monomials
                    .iter()
                    .zip(&lambdas)
                    .map(|(m, l)| m.exponents[j] * (l.log10() - m.target))
                    .sum();
                2.0 / (ln10 * theta[j]) * s
            })
            .collect())
    }

    /// Exponent table as an `N_d × N_x` matrix.
    pub fn exponent_matrix(&self) -> Matrix {
        Matrix::from_rows(
            &self
                .monomials
                .iter()
                .map(|m| m.exponents.clone())
                .collect::<Vec<_>>(),
        )
    }

    /// Builds a solution record for an arbitrary factor choice.
    pub fn solution_at(
        &self,
        theta: Vec<f64>,
        kind: CostKind,
        method_tag: impl Into<String>,
    ) -> Result<ScalingSolution> {
        let lambdas = self.eval_coefficients(&theta)?;
        let cost = cost_of_lambdas(&self.monomials, &lambdas, kind);
        let ratio = ratio(&lambdas)?;
        Ok(ScalingSolution {
            theta,
            lambdas,
            cost,
            ratio,
            method_tag: method_tag.into(),
        })
    }
}

fn cost_of_lambdas(monomials: &[Monomial], lambdas: &[f64], kind: CostKind) -> f64 {
    let dev = monomials
        .iter()
        .zip(lambdas)
        .map(|(m, l)| l.log10() - m.target);
    match kind {
        CostKind::Euclid => dev.map(|d| d * d).sum(),
        CostKind::Max => dev.map(f64::abs).fold(0.0, f64::max),
    }
}

/// Factor values with the coefficients they produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSolution {
    pub theta: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub cost: f64,
    /// `max λ / min λ`.
    pub ratio: f64,
    /// `euclid`, `anneal-max`, `anneal-eucl` or `subset:<1-based indices>`.
    pub method_tag: String,
}

impl ScalingSolution {
    pub fn rho(&self) -> Vec<f64> {
        self.theta.iter().map(|t| t.log10()).collect()
    }
}

/// `max / min` of a strictly positive vector.
pub fn ratio(lambdas: &[f64]) -> Result<f64> {
    if lambdas.is_empty() {
        return Err(Error::domain("ratio of an empty vector"));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::domain(format!("ratio needs positive entries, found {l}")));
    }
    let max = lambdas.iter().copied().fold(f64::MIN, f64::max);
    let min = lambdas.iter().copied().fold(f64::MAX, f64::min);
    Ok(max / min)
}

/// Minimizer of the Euclidean log cost from the normal equations `G ρ = b`.
pub fn solve_euclidean(problem: &ScalingProblem) -> Result<ScalingSolution> {
    let nx = problem.n_factors();
    let mut gram = Matrix::zeros(nx, nx);
    let mut b = vec![0.0; nx];
    for m in problem.monomials() {
        let shift = m.target - m.kappa.log10();
        for j in 0..nx {
            b[j] += m.exponents[j] * shift;
            for l in 0..nx {
                let v = gram.get(j, l) + m.exponents[j] * m.exponents[l];
                gram.set(j, l, v);
            }
        }
    }
    let rho = match linalg::solve(&gram, &b) {
        Ok(s) => s.x,
        Err(_) => {
            return Err(Error::DegenerateExponents {
                rank: linalg::rank(&problem.exponent_matrix(), PIVOT_EPS.sqrt()),
                factors: nx,
            })
        }
    };
    let theta = rho.iter().map(|r| 10f64.powf(*r)).collect();
    problem.solution_at(theta, CostKind::Euclid, "euclid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_projectile, ProjectileParams};

    fn projectile() -> ScalingProblem {
        build_projectile(&ProjectileParams::earth())
    }

    #[test]
    fn coefficients_at_unit_factors_equal_kappa() {
        let l = projectile().eval_coefficients(&[1.0, 1.0]).unwrap();
        assert!((l[0] - 9.8).abs() < 1e-15);
        assert!((l[1] - 1.5678e-7).abs() / 1.5678e-7 < 1e-4);
        assert!((l[2] - 25.0).abs() < 1e-15);
    }

    #[test]
    fn unit_kappas_give_unit_coefficients() {
        let p = ScalingProblem::new(
            vec!["a".into(), "b".into()],
            vec![
                Monomial::new("x", 1.0, vec![1.0, 2.0]),
                Monomial::new("y", 1.0, vec![-3.0, 0.5]),
            ],
        )
        .unwrap();
        assert_eq!(p.eval_coefficients(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(p.evaluate_cost(&[1.0, 1.0], CostKind::Euclid).unwrap(), 0.0);
        assert_eq!(p.evaluate_cost(&[1.0, 1.0], CostKind::Max).unwrap(), 0.0);
    }

    #[test]
    fn non_positive_theta_is_a_domain_error() {
        let p = projectile();
        assert!(matches!(p.eval_coefficients(&[0.0, 1.0]), Err(Error::Domain(_))));
        assert!(matches!(p.eval_coefficients(&[1.0, -2.0]), Err(Error::Domain(_))));
        assert!(matches!(p.eval_coefficients(&[1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn problem_validation() {
        let bad_kappa = ScalingProblem::new(
            vec!["a".into()],
            vec![Monomial::new("x", 0.0, vec![1.0])],
        );
        assert!(bad_kappa.is_err());
        let dup = ScalingProblem::new(
            vec!["a".into(), "a".into()],
            vec![Monomial::new("x", 1.0, vec![1.0, 1.0])],
        );
        assert!(dup.is_err());
        let short = ScalingProblem::new(
            vec!["a".into(), "b".into()],
            vec![Monomial::new("x", 1.0, vec![1.0])],
        );
        assert!(short.is_err());
    }

    #[test]
    fn euclid_cost_of_method_a_row() {
        // Row (a): λ = (1, 1, sqrt(v0²/(gR))).
        let p = projectile();
        let pr = ProjectileParams::earth();
        let theta = [(pr.r / pr.g).sqrt(), pr.r];
        let c = p.evaluate_cost(&theta, CostKind::Euclid).unwrap();
        let l3 = (pr.v0 * pr.v0 / (pr.g * pr.r)).sqrt();
        assert!((c - l3.log10().powi(2)).abs() < 1e-12);
        // printed λ3 = 3.2e-3 rounds the exact 10^-2.5
        assert!((c - 6.22).abs() < 0.05);
        assert!((3.2e-3f64.log10().powi(2) - 6.22).abs() < 0.01);
    }

    #[test]
    fn max_cost_of_table_row_e_values() {
        // Row (e) as printed: λ = (1.4e1, 5.8e-2, 5.0e-2).
        let printed: [f64; 3] = [1.4e1, 5.8e-2, 5.0e-2];
        let c = printed.iter().map(|l| l.log10().abs()).fold(0.0, f64::max);
        assert!((c - 1.30).abs() < 0.005);
    }

    #[test]
    fn single_monomial_closed_form() {
        let p = ScalingProblem::new(
            vec!["x".into()],
            vec![Monomial::new("l", 7.5, vec![-1.5])],
        )
        .unwrap();
        let s = solve_euclidean(&p).unwrap();
        assert!((s.theta[0] - 7.5f64.powf(1.0 / 1.5)).abs() / s.theta[0] < 1e-12);
        assert!((s.lambdas[0] - 1.0).abs() < 1e-12);
        assert!(s.cost < 1e-24);
    }

    #[test]
    fn degenerate_exponents_report_rank() {
        let p = ScalingProblem::new(
            vec!["a".into(), "b".into()],
            vec![
                Monomial::new("x", 2.0, vec![1.0, 1.0]),
                Monomial::new("y", 3.0, vec![2.0, 2.0]),
            ],
        )
        .unwrap();
        match solve_euclidean(&p) {
            Err(Error::DegenerateExponents { rank, factors }) => {
                assert_eq!((rank, factors), (1, 2));
            }
            other => panic!("expected degenerate error, got {other:?}"),
        }
    }

    #[test]
    fn ratio_cases() {
        assert_eq!(ratio(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert!((ratio(&[1.0e5, 1.0, 1.0]).unwrap() - 1.0e5).abs() < 1e-9);
        assert!(ratio(&[]).is_err());
        assert!(ratio(&[1.0, 0.0]).is_err());
        assert!(ratio(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn problem_serde_validates() {
        let text = r#"
            factors = ["t_c [s]", "x_c [m]"]
            [[monomials]]
            label = "l1"
            kappa = 9.8
            exponents = [2.0, -1.0]
        "#;
        let p: ScalingProblem = toml::from_str(text).unwrap();
        assert_eq!(p.n_factors(), 2);
        assert_eq!(p.monomials()[0].target, 0.0);
        let bad = text.replace("9.8", "-1.0");
        assert!(toml::from_str::<ScalingProblem>(&bad).is_err());
    }
}
