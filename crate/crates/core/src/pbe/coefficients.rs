use crate::error::{Error, Result};
use crate::models::{LatexScaling, LATEX_LABELS};
use serde::{Deserialize, Serialize};

/// Dimensionless latex coefficients plus the constants the factors do not touch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatexCoefficients {
    pub a_m: f64,
    pub a_w: f64,
    pub d: f64,
    pub p: f64,
    pub n: f64,
    /// Critical volume `λ_c`, the centre of the nucleation Gaussian.
    #[serde(alias = "c")]
    pub lambda_c: f64,
    pub mu_m: f64,
    pub mu_w: f64,
    pub mat_dm: f64,
    pub mat_dw: f64,
    pub m_s: f64,
    pub mat_s: f64,
    pub pol2_pol1: f64,
    pub mat_pol1: f64,
    pub m_p: f64,
    pub w_p: f64,
    pub pol2_p: f64,
    pub pol1_p: f64,
    pub mat_p: f64,
    pub phi_s: f64,
    pub psi_bar: f64,
    pub psi_r: f64,
    /// Width of the nucleation Gaussian; `λ_c / 50` when absent.
    #[serde(default)]
    pub sigma_c: Option<f64>,
}

/// `σ_c` used when none is given.
pub const DEFAULT_SIGMA_RATIO: f64 = 50.0;

impl LatexCoefficients {
    /// Maps the realized coefficients of a latex scaling onto named fields.
    pub fn from_scaling(latex: &LatexScaling, lambdas: &[f64]) -> Result<Self> {
        let problem = &latex.problem;
        if lambdas.len() != problem.n_coefficients() {
            return Err(Error::domain("lambda vector does not match the latex problem"));
        }
        let get = |label: &str| -> Result<f64> {
            problem
                .monomial(label)
                .map(|(i, _)| lambdas[i])
                .ok_or_else(|| Error::domain(format!("latex problem lacks coefficient {label}")))
        };
        let c = LatexCoefficients {
            a_m: get(LATEX_LABELS[0])?,
            a_w: get(LATEX_LABELS[1])?,
            d: get(LATEX_LABELS[2])?,
            p: get(LATEX_LABELS[3])?,
            n: get(LATEX_LABELS[4])?,
            lambda_c: get(LATEX_LABELS[5])?,
            mu_m: get(LATEX_LABELS[6])?,
            mu_w: get(LATEX_LABELS[7])?,
            mat_dm: get(LATEX_LABELS[8])?,
            mat_dw: get(LATEX_LABELS[9])?,
            m_s: get(LATEX_LABELS[10])?,
            mat_s: get(LATEX_LABELS[11])?,
            pol2_pol1: get(LATEX_LABELS[12])?,
            mat_pol1: get(LATEX_LABELS[13])?,
            m_p: get(LATEX_LABELS[14])?,
            w_p: get(LATEX_LABELS[15])?,
            pol2_p: get(LATEX_LABELS[16])?,
            pol1_p: get(LATEX_LABELS[17])?,
            mat_p: get(LATEX_LABELS[18])?,
            phi_s: latex.phi_s,
            psi_bar: latex.psi_bar,
            psi_r: latex.psi_r,
            sigma_c: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn sigma_c(&self) -> f64 {
        self.sigma_c.unwrap_or(self.lambda_c / DEFAULT_SIGMA_RATIO)
    }

    /// Values in label order.
    pub fn lambdas(&self) -> [f64; 19] {
        [
            self.a_m, self.a_w, self.d, self.p, self.n, self.lambda_c, self.mu_m, self.mu_w,
            self.mat_dm, self.mat_dw, self.m_s, self.mat_s, self.pol2_pol1, self.mat_pol1,
            self.m_p, self.w_p, self.pol2_p, self.pol1_p, self.mat_p,
        ]
    }

    /// Rate coefficients may vanish (switching a mechanism off); the volumes
    /// that appear in denominators and the Gaussian parameters may not.
    pub fn validate(&self) -> Result<()> {
        for (label, v) in LATEX_LABELS.iter().zip(self.lambdas()) {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("coefficient {label} = {v} must be non-negative")));
            }
        }
        for (label, v) in [
            ("c", self.lambda_c),
            ("pol1_p", self.pol1_p),
            ("pol2_pol1", self.pol2_pol1),
            ("mat_pol1", self.mat_pol1),
        ] {
            if v <= 0.0 {
                return Err(Error::domain(format!("coefficient {label} must be positive")));
            }
        }
        if !(self.phi_s >= 0.0 && self.phi_s < 1.0) {
            return Err(Error::domain("phi_s must lie in [0, 1)"));
        }
        if !(self.psi_bar >= 0.0 && self.psi_bar.is_finite()) || !(self.psi_r >= 0.0 && self.psi_r.is_finite()) {
            return Err(Error::domain("psi_bar and psi_r must be non-negative"));
        }
        let sc = self.sigma_c();
        if !(sc > 0.0 && sc.is_finite()) {
            return Err(Error::domain("sigma_c must be positive"));
        }
        if self.lambda_c / sc < 10.0 {
            return Err(Error::domain(format!(
                "lambda_c / sigma_c = {} is below 10",
                self.lambda_c / sc
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_latex, latex_theta, LatexParams, LatexTheta};

    fn eucl() -> LatexCoefficients {
        let lat = build_latex(&LatexParams::polymat_2018());
        let s = latex_theta(&lat, LatexTheta::Eucl).unwrap();
        LatexCoefficients::from_scaling(&lat, &s.lambdas).unwrap()
    }

    #[test]
    fn eucl_values() {
        let c = eucl();
        assert!((c.lambda_c - 0.858).abs() < 1e-3);
        assert!((c.sigma_c() - c.lambda_c / 50.0).abs() < 1e-15);
        assert!((c.d - 248.6).abs() < 0.1);
        assert_eq!(c.psi_bar, 1.0);
    }

    #[test]
    fn rejects_narrow_ratio_and_negatives() {
        let mut c = eucl();
        c.sigma_c = Some(c.lambda_c / 5.0);
        assert!(c.validate().is_err());
        let mut c = eucl();
        c.d = -1.0;
        assert!(c.validate().is_err());
        let mut c = eucl();
        c.n = 0.0;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn toml_round_trip() {
        let c = eucl();
        let text = toml::to_string(&c).unwrap();
        let back: LatexCoefficients = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
