//! Ready-made scaling problems: the projectile, the Schrödinger equation in a
//! magnetic field, Landau–de Gennes in the large-body regime, and the latex
//! particle morphology model.

use crate::error::{Error, Result};
use crate::scaling::{solve_euclidean, solve_subset, Monomial, ScalingProblem, ScalingSolution};
use serde::{Deserialize, Serialize};

fn check_positive(fields: &[(&str, f64)]) -> Result<()> {
    for (name, v) in fields {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("parameter {name} = {v} must be positive")));
        }
    }
    Ok(())
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------- projectile

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectileParams {
    /// Gravitational acceleration [m/s²].
    pub g: f64,
    /// Earth radius [m].
    pub r: f64,
    /// Launch speed [m/s].
    pub v0: f64,
}

impl ProjectileParams {
    pub fn earth() -> Self {
        ProjectileParams {
            g: 9.8,
            r: 6.3781e6,
            v0: 25.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(&[("g", self.g), ("r", self.r), ("v0", self.v0)])
    }
}

impl Default for ProjectileParams {
    fn default() -> Self {
        Self::earth()
    }
}

/// `λ1 = g t_c²/x_c`, `λ2 = x_c/R`, `λ3 = v0 t_c/x_c`.
pub fn build_projectile(p: &ProjectileParams) -> ScalingProblem {
    ScalingProblem::new(
        names(&["t_c [s]", "x_c [m]"]),
        vec![
            Monomial::new("lambda_1", p.g, vec![2.0, -1.0]),
            Monomial::new("lambda_2", 1.0 / p.r, vec![0.0, 1.0]),
            Monomial::new("lambda_3", p.v0, vec![1.0, -1.0]),
        ],
    )
    .expect("projectile problem is well formed for positive parameters")
}

// --------------------------------------------------------------- schrodinger

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchrodingerParams {
    /// Reduced Planck constant [J·s].
    pub hbar: f64,
    /// Electron mass [kg].
    pub mu: f64,
    /// Elementary charge [C].
    pub e: f64,
    /// Magnetic field [T].
    pub b: f64,
    /// Coulomb constant `1/(4πε)` [J·m/C²].
    pub coulomb: f64,
}

impl SchrodingerParams {
    /// CODATA-era constants with a 45 T field.
    pub fn hydrogen_45t() -> Self {
        SchrodingerParams {
            hbar: 1.054_571_726_47e-34,
            mu: 9.109_382_914_0e-31,
            e: 1.602_176_565_35e-19,
            b: 45.0,
            coulomb: 8.987_551_787_368e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(&[
            ("hbar", self.hbar),
            ("mu", self.mu),
            ("e", self.e),
            ("b", self.b),
            ("coulomb", self.coulomb),
        ])
    }
}

impl Default for SchrodingerParams {
    fn default() -> Self {
        Self::hydrogen_45t()
    }
}

pub fn build_schrodinger(p: &SchrodingerParams) -> ScalingProblem {
    let e2 = p.e * p.e;
    ScalingProblem::new(
        names(&["alpha_0 [m]", "beta_0 [s]", "gamma_0 [m^-3/2]"]),
        vec![
            Monomial::new("lambda_1", p.hbar / p.mu, vec![-2.0, 1.0, 0.0]),
            Monomial::new("lambda_2", p.e * p.b / (2.0 * p.mu), vec![0.0, 1.0, 0.0]),
            Monomial::new(
                "lambda_3",
                e2 * p.b * p.b / (8.0 * p.mu * p.hbar),
                vec![2.0, 1.0, 0.0],
            ),
            Monomial::new("lambda_4", p.coulomb * e2 / p.hbar, vec![-1.0, 1.0, 0.0]),
            Monomial::new("lambda_5", 1.0, vec![3.0, 0.0, 2.0]),
        ],
    )
    .expect("schrodinger problem is well formed for positive parameters")
}

/// Atomic units `(α0, β0, γ0)`: Bohr radius, its time unit, and `α0^{-3/2}`.
pub fn atomic_units(p: &SchrodingerParams) -> Vec<f64> {
    let four_pi_eps = 1.0 / p.coulomb;
    let e2 = p.e * p.e;
    let alpha0 = four_pi_eps * p.hbar * p.hbar / (p.mu * e2);
    let beta0 = four_pi_eps * four_pi_eps * p.hbar.powi(3) / (p.mu * e2 * e2);
    let gamma0 = p.mu.powf(1.5) * p.e.powi(3) / (four_pi_eps.powf(1.5) * p.hbar.powi(3));
    vec![alpha0, beta0, gamma0]
}

// ----------------------------------------------------------- landau-de gennes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdGParams {
    pub l: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Decades between the domain size and the nematic correlation length.
    pub q: u32,
}

impl LdGParams {
    /// Typical nematic constants in SI units with `A = 0`.
    pub fn nematic() -> Self {
        LdGParams {
            l: 4.0e-11,
            a: 0.0,
            b: 0.64e6,
            c: 0.35e6,
            q: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(&[("l", self.l), ("b", self.b), ("c", self.c)])?;
        if !self.a.is_finite() {
            return Err(Error::domain("parameter a must be finite"));
        }
        if self.q == 0 {
            return Err(Error::domain("q must be a positive integer"));
        }
        Ok(())
    }

    pub fn a_ni(&self) -> f64 {
        self.b * self.b / (27.0 * self.c)
    }

    pub fn xi_ni(&self) -> f64 {
        (self.l / self.a_ni()).sqrt()
    }

    /// `ϑ = A/A_NI`, independent of the scaling factors.
    pub fn vartheta(&self) -> f64 {
        self.a / self.a_ni()
    }
}

impl Default for LdGParams {
    fn default() -> Self {
        Self::nematic()
    }
}

/// Factors `(x0, Q0, F0)` with targets `(0, −q, 0, 0)`.
pub fn build_ldg(p: &LdGParams) -> ScalingProblem {
    let a_ni = p.a_ni();
    let q = f64::from(p.q);
    ScalingProblem::new(
        names(&["x_0", "Q_0", "F_0"]),
        vec![
            Monomial::new("lambda_1", a_ni, vec![3.0, 2.0, -1.0]),
            Monomial::new("lambda_2", p.xi_ni(), vec![-1.0, 0.0, 0.0]).with_target(-q),
            Monomial::new("lambda_3", p.b / (27f64.sqrt() * a_ni), vec![0.0, 1.0, 0.0]),
            Monomial::new("lambda_4", p.c / a_ni, vec![0.0, 2.0, 0.0]),
        ],
    )
    .expect("ldg problem is well formed for positive parameters")
}

/// Physical large-body scaling `x0 = ξ_NI 10^q`, `Q0 = B/(√27 C)`, `F0 = Q0² A_NI x0³`.
pub fn ldg_reference_factors(p: &LdGParams) -> Vec<f64> {
    let x0 = p.xi_ni() * 10f64.powi(p.q as i32);
    let q0 = p.b / (27f64.sqrt() * p.c);
    let f0 = q0 * q0 * p.a_ni() * x0.powi(3);
    vec![x0, q0, f0]
}

// --------------------------------------------------------------------- latex

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatexParams {
    /// Coagulation constant [L^{1/3}/s].
    pub k_a: f64,
    /// Sintering constant [L^{1/3}/s].
    pub k_d: f64,
    /// Propagation constant [L/(mol·s)].
    pub k_p: f64,
    /// Nucleation constant [L/s].
    pub k_s: f64,
    /// Migration rate [1/s].
    pub k_mu: f64,
    /// Monomer amount [mol].
    pub m_bar: f64,
    /// Monomer molar volume [L/mol].
    pub v_mon2: f64,
    /// Seed polymer volume [L].
    pub v_pol1: f64,
    /// Critical cluster volume [L].
    pub v_c: f64,
    /// Polymer molar volume [L/mol].
    pub v_pol2_bar: f64,
    /// Saturation volume fraction.
    pub phi_s: f64,
    /// Particle count.
    pub n_p: f64,
    /// Radical amount [mol].
    pub r_mol: f64,
}

impl LatexParams {
    /// Named preset `polymat-2018`.
    pub fn polymat_2018() -> Self {
        LatexParams {
            k_a: 2.0e-8,
            k_d: 5.0e-8,
            k_p: 850.0,
            k_s: 2.5e-5,
            k_mu: 1.0e-5,
            m_bar: 2.5,
            v_mon2: 0.1,
            v_pol1: 0.25,
            v_c: 2.5e-22,
            v_pol2_bar: 0.095,
            phi_s: 1.0e-3,
            n_p: 2.8e17,
            r_mol: 2.3e-7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(&[
            ("k_a", self.k_a),
            ("k_d", self.k_d),
            ("k_p", self.k_p),
            ("k_s", self.k_s),
            ("k_mu", self.k_mu),
            ("m_bar", self.m_bar),
            ("v_mon2", self.v_mon2),
            ("v_pol1", self.v_pol1),
            ("v_c", self.v_c),
            ("v_pol2_bar", self.v_pol2_bar),
            ("phi_s", self.phi_s),
            ("n_p", self.n_p),
            ("r_mol", self.r_mol),
        ])?;
        if self.phi_s >= 1.0 {
            return Err(Error::domain("phi_s must be below 1"));
        }
        Ok(())
    }
}

impl Default for LatexParams {
    fn default() -> Self {
        Self::polymat_2018()
    }
}

/// Labels of the latex coefficients in problem order.
pub const LATEX_LABELS: [&str; 19] = [
    "a_m", "a_w", "d", "p", "n", "c", "mu_m", "mu_w", "mat_dm", "mat_dw", "m_s", "mat_s",
    "pol2_pol1", "mat_pol1", "m_p", "w_p", "pol2_p", "pol1_p", "mat_p",
];

/// Latex problem plus its factor-free constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LatexScaling {
    pub problem: ScalingProblem,
    /// `Ψ̄ = M̄ V̄_mon2 / V_pol1`, the initial monomer/polymer ratio.
    pub psi_bar: f64,
    /// `Ψ_r = V̄_mon2 / V̄_pol2`.
    pub psi_r: f64,
    pub phi_s: f64,
}

/// Factors `(ν0, t0, m0, w0, M0, P0, Π0, δ0)` and the nineteen coefficients.
pub fn build_latex(p: &LatexParams) -> LatexScaling {
    let c36 = (36.0 * std::f64::consts::PI).cbrt();
    let kp_r = p.k_p * p.r_mol * p.v_pol2_bar / p.v_mon2;
    let third = 1.0 / 3.0;
    #[rustfmt::skip]
    let table: [(f64, [f64; 8]); 19] = [
        (p.k_a / p.n_p, [2.0 * third, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        (p.k_a / p.n_p, [2.0 * third, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
        (c36 * p.k_d,   [-third, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        (kp_r,          [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0]),
        (p.k_s / p.v_c, [0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        (p.v_c,         [-2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
        (p.k_mu,        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        (p.k_mu,        [0.0, 1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0]),
        (c36 * p.k_d,   [5.0 * third, 1.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0]),
        (c36 * p.k_d,   [5.0 * third, 1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0]),
        (p.k_s,         [-2.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        (p.k_s,         [0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0]),
        (p.v_pol1,      [0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
        (p.v_pol1,      [0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0]),
        (1.0,           [2.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0]),
        (1.0,           [2.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0]),
        (kp_r,          [0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
        (p.v_pol1,      [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0]),
        (1.0,           [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0]),
    ];
    let monomials = LATEX_LABELS
        .iter()
        .zip(table)
        .map(|(label, (kappa, exps))| Monomial::new(*label, kappa, exps.to_vec()))
        .collect();
    let problem = ScalingProblem::new(
        names(&[
            "nu_0 [L]", "t_0 [s]", "m_0 [1/L]", "w_0 [1/L]", "M_0 [L]", "P_0 [L]", "Pi_0 [L]",
            "delta_0 [1/L]",
        ]),
        monomials,
    )
    .expect("latex problem is well formed for positive parameters");
    LatexScaling {
        problem,
        psi_bar: p.m_bar * p.v_mon2 / p.v_pol1,
        psi_r: p.v_mon2 / p.v_pol2_bar,
        phi_s: p.phi_s,
    }
}

/// Coefficients forced to one by the deliberately poor test scaling.
pub const LATEX_TEST_SUBSET: [&str; 8] =
    ["a_w", "n", "mu_w", "mat_dw", "mat_s", "pol2_pol1", "w_p", "pol2_p"];

/// Which factor set a latex run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatexTheta {
    /// Least-squares optimum.
    Eucl,
    /// Traditional scaling on [`LATEX_TEST_SUBSET`], ratio about 10^6.
    Test,
}

/// Solves for the requested latex factor set.
pub fn latex_theta(latex: &LatexScaling, which: LatexTheta) -> Result<ScalingSolution> {
    match which {
        LatexTheta::Eucl => solve_euclidean(&latex.problem),
        LatexTheta::Test => {
            let idx: Vec<usize> = LATEX_TEST_SUBSET
                .iter()
                .map(|l| latex.problem.monomial(l).map(|(i, _)| i))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::domain("latex problem lacks a test-subset coefficient"))?;
            solve_subset(&latex.problem, &idx)
        }
    }
}

// ------------------------------------------------------------------- presets

/// Scaling problems addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Projectile,
    Schrodinger,
    Ldg,
    Latex,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Projectile, Preset::Schrodinger, Preset::Ldg, Preset::Latex];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Projectile => "projectile",
            Preset::Schrodinger => "schrodinger",
            Preset::Ldg => "ldg",
            Preset::Latex => "latex",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let wanted = name.to_ascii_lowercase();
        let wanted = match wanted.as_str() {
            "polymat-2018" => "latex",
            other => other,
        };
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == wanted)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset {name:?} (expected projectile, schrodinger, ldg or latex)"
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::ratio;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn projectile_table() {
        let p = build_projectile(&ProjectileParams::earth());
        assert_eq!((p.n_coefficients(), p.n_factors()), (3, 2));
        let rows: Vec<_> = p.monomials().iter().map(|m| m.exponents.clone()).collect();
        assert_eq!(rows, vec![vec![2.0, -1.0], vec![0.0, 1.0], vec![1.0, -1.0]]);
        assert_eq!(p.monomials()[1].kappa, 1.0 / 6.3781e6);
    }

    #[test]
    fn schrodinger_kappa_two() {
        let p = build_schrodinger(&SchrodingerParams::hydrogen_45t());
        assert_eq!((p.n_coefficients(), p.n_factors()), (5, 3));
        assert!(rel(p.monomials()[1].kappa, 3.96e12) < 0.01);
        assert_eq!(p.monomials()[4].exponents, vec![3.0, 0.0, 2.0]);
    }

    #[test]
    fn atomic_units_make_three_coefficients_one() {
        let sp = SchrodingerParams::hydrogen_45t();
        let th = atomic_units(&sp);
        assert!(rel(th[0], 5.3e-11) < 0.05);
        assert!(rel(th[1], 2.4e-17) < 0.05);
        let l = build_schrodinger(&sp).eval_coefficients(&th).unwrap();
        for i in [0, 3, 4] {
            assert!((l[i] - 1.0).abs() < 1e-9, "lambda_{} = {}", i + 1, l[i]);
        }
    }

    #[test]
    fn ldg_reference_regime() {
        let lp = LdGParams::nematic();
        let p = build_ldg(&lp);
        let targets: Vec<f64> = p.monomials().iter().map(|m| m.target).collect();
        assert_eq!(targets, vec![0.0, -3.0, 0.0, 0.0]);
        let l = p.eval_coefficients(&ldg_reference_factors(&lp)).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-12);
        assert!((l[1] - 1e-3).abs() < 1e-15);
        assert!((l[2] - 1.0).abs() < 1e-12);
        assert!((l[3] - 1.0).abs() < 1e-12);
        assert_eq!(lp.vartheta(), 0.0);
    }

    #[test]
    fn latex_shape() {
        let lat = build_latex(&LatexParams::polymat_2018());
        assert_eq!((lat.problem.n_coefficients(), lat.problem.n_factors()), (19, 8));
        let (_, d) = lat.problem.monomial("d").unwrap();
        assert_eq!(d.exponents, vec![-1.0 / 3.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((lat.psi_bar - 1.0).abs() < 1e-15);
        assert!(rel(lat.psi_r, 0.1 / 0.095) < 1e-15);
    }

    #[test]
    fn latex_nucleation_moment_identity() {
        // λ_n · λ_c = λ^m_s for any factors.
        let lat = build_latex(&LatexParams::polymat_2018());
        let theta = [1e-17, 2e3, 7e32, 2e32, 0.7, 0.3, 0.16, 3e12];
        let l = lat.problem.eval_coefficients(&theta).unwrap();
        assert!(rel(l[4] * l[5], l[10]) < 1e-12);
    }

    #[test]
    fn latex_test_theta_has_large_ratio() {
        let lat = build_latex(&LatexParams::polymat_2018());
        let t = latex_theta(&lat, LatexTheta::Test).unwrap();
        let r = ratio(&t.lambdas).unwrap().log10();
        assert!((5.5..6.5).contains(&r), "log10 r = {r}");
        let e = latex_theta(&lat, LatexTheta::Eucl).unwrap();
        assert!(e.ratio < t.ratio);
    }

    #[test]
    fn preset_names() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()).unwrap(), p);
        }
        assert_eq!(Preset::from_name("polymat-2018").unwrap(), Preset::Latex);
        assert!(Preset::from_name("nope").is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ProjectileParams { g: 0.0, ..ProjectileParams::earth() }.validate().is_err());
        assert!(LatexParams { phi_s: 1.0, ..LatexParams::polymat_2018() }.validate().is_err());
        assert!(LdGParams { q: 0, ..LdGParams::nematic() }.validate().is_err());
        assert!(SchrodingerParams::hydrogen_45t().validate().is_ok());
    }
}
