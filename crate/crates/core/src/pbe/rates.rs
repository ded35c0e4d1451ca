//! Point rates of the dimensionless latex model.

use super::coefficients::LatexCoefficients;
use super::quadrature::gaussian_delta;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The five scalar unknowns carried next to the distributions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Auxiliaries {
    /// Polymer volume in the matrix.
    pub v_mat: f64,
    /// Polymer volume in non-equilibrium clusters.
    pub v_cm: f64,
    /// Polymer volume in equilibrium clusters.
    pub v_cw: f64,
    /// Monomer/polymer volume ratio.
    pub psi: f64,
    /// Total second-stage polymer volume.
    pub v_pol2: f64,
}

impl Auxiliaries {
    pub const NAMES: [&'static str; 5] = ["V_mat", "V_cm", "V_cw", "Psi", "V_pol2"];

    pub fn initial(coeffs: &LatexCoefficients) -> Self {
        Auxiliaries {
            psi: coeffs.psi_bar,
            ..Default::default()
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.v_mat, self.v_cm, self.v_cw, self.psi, self.v_pol2]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Auxiliaries {
            v_mat: s[0],
            v_cm: s[1],
            v_cw: s[2],
            psi: s[3],
            v_pol2: s[4],
        }
    }
}

/// Polymer fraction `Φ` of the matrix above saturation, and particle volume `V_p`.
pub fn phi_and_vp(c: &LatexCoefficients, aux: &Auxiliaries) -> (f64, f64) {
    let s = aux.psi + 1.0;
    let phi = (aux.v_mat / (s * (aux.v_mat + c.mat_pol1)) - c.phi_s).max(0.0);
    let vp = s * (c.mat_p * aux.v_mat + c.m_p * aux.v_cm + c.w_p * aux.v_cw + c.pol1_p);
    (phi, vp)
}

/// Checked [`phi_and_vp`]: fails when `Ψ < 0` or `V_p ≤ 0`.
pub fn checked_phi_and_vp(c: &LatexCoefficients, aux: &Auxiliaries) -> Result<(f64, f64)> {
    if !(aux.psi >= 0.0) {
        return Err(Error::StateCorruption(format!("Psi = {} is negative", aux.psi)));
    }
    let (phi, vp) = phi_and_vp(c, aux);
    if !(vp > 0.0) {
        return Err(Error::StateCorruption(format!("particle volume V_p = {vp} is not positive")));
    }
    Ok((phi, vp))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub a_m: f64,
    pub a_w: f64,
    pub g: f64,
    pub dg_dv: f64,
    pub n: f64,
    pub mu_m: f64,
    pub mu_w: f64,
}

/// Rates at volume `v` (and partner volume `u` for coagulation).
pub fn rate_functions(c: &LatexCoefficients, aux: &Auxiliaries, v: f64, u: f64) -> Result<Rates> {
    if !(v > 0.0) || !(u > 0.0) {
        return Err(Error::domain(format!("rates need positive volumes, got v = {v}, u = {u}")));
    }
    let (phi, vp) = checked_phi_and_vp(c, aux)?;
    let s = aux.psi + 1.0;
    let kernel = s.powf(14.0 / 3.0) * (v.powf(-1.0 / 3.0) + u.powf(-1.0 / 3.0));
    let grow = c.d * phi * s.powf(2.0 / 3.0);
    let poly = c.p * aux.psi / vp;
    Ok(Rates {
        a_m: c.a_m * kernel,
        a_w: c.a_w * kernel,
        g: grow * v.powf(2.0 / 3.0) + poly * v,
        dg_dv: 2.0 / 3.0 * grow * v.powf(-1.0 / 3.0) + poly,
        n: c.n * phi * gaussian_delta(v, c.lambda_c, c.sigma_c()),
        mu_m: c.mu_m,
        mu_w: c.mu_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_latex, latex_theta, LatexParams, LatexTheta};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeffs() -> LatexCoefficients {
        let lat = build_latex(&LatexParams::polymat_2018());
        let s = latex_theta(&lat, LatexTheta::Eucl).unwrap();
        LatexCoefficients::from_scaling(&lat, &s.lambdas).unwrap()
    }

    #[test]
    fn initial_state_values() {
        let c = coeffs();
        let aux = Auxiliaries::initial(&c);
        let (phi, vp) = phi_and_vp(&c, &aux);
        assert_eq!(phi, 0.0);
        assert!((vp - (c.psi_bar + 1.0) * c.pol1_p).abs() < 1e-15);
    }

    #[test]
    fn kernel_symmetry_and_zero_phi() {
        let c = coeffs();
        let aux = Auxiliaries {
            psi: 0.7,
            ..Default::default()
        };
        let r1 = rate_functions(&c, &aux, 0.3, 2.0).unwrap();
        let r2 = rate_functions(&c, &aux, 2.0, 0.3).unwrap();
        assert_eq!(r1.a_m, r2.a_m);
        assert_eq!(r1.a_w, r2.a_w);
        let (_, vp) = phi_and_vp(&c, &aux);
        assert!((r1.g - c.p * 0.7 / vp * 0.3).abs() < 1e-15);
        assert_eq!(r1.n, 0.0);
        assert_eq!(r1.mu_m, c.mu_m);
        assert!(rate_functions(&c, &aux, 0.0, 1.0).is_err());
    }

    #[test]
    fn growth_derivative_matches_difference() {
        let c = coeffs();
        let aux = Auxiliaries {
            v_mat: 3.0,
            v_cm: 0.2,
            v_cw: 0.1,
            psi: 0.5,
            v_pol2: 0.4,
        };
        let v = 0.8;
        let dv = 1e-6;
        let gp = rate_functions(&c, &aux, v + dv, 1.0).unwrap().g;
        let gm = rate_functions(&c, &aux, v - dv, 1.0).unwrap().g;
        let exact = rate_functions(&c, &aux, v, 1.0).unwrap().dg_dv;
        assert!(((gp - gm) / (2.0 * dv) - exact).abs() / exact < 1e-8);
    }

    #[test]
    fn phi_below_one_on_random_states() {
        let c = coeffs();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let aux = Auxiliaries {
                v_mat: rng.random_range(0.0..1e6),
                v_cm: rng.random_range(0.0..10.0),
                v_cw: rng.random_range(0.0..10.0),
                psi: rng.random_range(0.0..5.0),
                v_pol2: 0.0,
            };
            let (phi, _) = phi_and_vp(&c, &aux);
            assert!((0.0..1.0).contains(&phi));
        }
    }

    #[test]
    fn corrupted_states() {
        let c = coeffs();
        let neg_psi = Auxiliaries {
            psi: -0.1,
            ..Default::default()
        };
        assert!(matches!(checked_phi_and_vp(&c, &neg_psi), Err(Error::StateCorruption(_))));
        let neg_vp = Auxiliaries {
            v_cm: -1e9,
            psi: 0.1,
            ..Default::default()
        };
        assert!(matches!(checked_phi_and_vp(&c, &neg_vp), Err(Error::StateCorruption(_))));
    }
}
