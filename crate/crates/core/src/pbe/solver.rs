use super::aggregation::AggregationOperator;
use super::coefficients::LatexCoefficients;
use super::quadrature::{fd4_into, gaussian_delta, simpson_weights};
use super::rates::{checked_phi_and_vp, Auxiliaries};
use super::Grid;
use crate::error::{Error, Result};
use crate::models::{build_latex, latex_theta, LatexParams, LatexTheta};
use crate::ode::Rk4;
use serde::{Deserialize, Serialize};

/// Dimensional upper particle volume of the latex runs [L].
pub const DIMENSIONAL_V_MAX: f64 = 1e-16;
/// Dimensional duration of the latex runs [s].
pub const DIMENSIONAL_T_MAX: f64 = 450.0;
/// Tail-to-peak ratio at `φ_N` beyond which the grid is considered too short.
pub const TRUNCATION_RATIO: f64 = 1e-6;

/// Distributions on the grid plus the scalar volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct PbeState {
    pub m: Vec<f64>,
    pub w: Vec<f64>,
    pub aux: Auxiliaries,
}

impl PbeState {
    /// Empty distributions with `Ψ = Ψ̄`.
    pub fn initial(coeffs: &LatexCoefficients, grid: &Grid) -> Self {
        PbeState {
            m: vec![0.0; grid.n() + 1],
            w: vec![0.0; grid.n() + 1],
            aux: Auxiliaries::initial(coeffs),
        }
    }

    /// Layout `[m_0..m_N, w_0..w_N, V_mat, V_cm, V_cw, Ψ, V_pol2]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.m.len() * 2 + 5);
        y.extend_from_slice(&self.m);
        y.extend_from_slice(&self.w);
        y.extend_from_slice(&self.aux.to_array());
        y
    }

    pub fn from_slice(y: &[f64], n: usize) -> Self {
        PbeState {
            m: y[..=n].to_vec(),
            w: y[n + 1..2 * n + 2].to_vec(),
            aux: Auxiliaries::from_slice(&y[2 * n + 2..]),
        }
    }
}

/// Semi-discrete right-hand side with its precomputed grid data.
#[derive(Debug, Clone)]
pub struct PbeSystem {
    coeffs: LatexCoefficients,
    grid: Grid,
    op: AggregationOperator,
    p23: Vec<f64>,
    inv_cbrt: Vec<f64>,
    gauss: Vec<f64>,
    full: Vec<f64>,
    freeze: bool,
    deriv: Vec<f64>,
    gain: Vec<f64>,
    loss: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
    /// Largest `|g|` seen by any evaluation.
    pub g_max: f64,
}

impl PbeSystem {
    pub fn new(coeffs: LatexCoefficients, grid: Grid) -> Result<Self> {
        coeffs.validate()?;
        let n = grid.n();
        let nodes = grid.nodes();
        let sc = coeffs.sigma_c();
        Ok(PbeSystem {
            op: AggregationOperator::new(&grid)?,
            p23: nodes.iter().map(|v| v.powf(2.0 / 3.0)).collect(),
            inv_cbrt: nodes
                .iter()
                .map(|v| if *v > 0.0 { v.powf(-1.0 / 3.0) } else { 0.0 })
                .collect(),
            gauss: nodes.iter().map(|v| gaussian_delta(*v, coeffs.lambda_c, sc)).collect(),
            full: simpson_weights(n, grid.h())?,
            freeze: false,
            deriv: vec![0.0; n + 1],
            gain: vec![0.0; n + 1],
            loss: vec![0.0; n + 1],
            g: vec![0.0; n + 1],
            dg: vec![0.0; n + 1],
            g_max: 0.0,
            coeffs,
            grid,
        })
    }

    /// Holds both distributions fixed so only the scalar volumes evolve.
    pub fn freeze_distributions(mut self, freeze: bool) -> Self {
        self.freeze = freeze;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &LatexCoefficients {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        2 * self.grid.n() + 7
    }

    /// `∫ φ dist` over the grid.
    pub fn first_moment(&self, dist: &[f64]) -> f64 {
        (0..dist.len())
            .map(|k| self.full[k] * self.grid.node(k) * dist[k])
            .sum()
    }

    fn sigma(&self, dist: &[f64], s23: f64) -> f64 {
        s23 * (0..dist.len())
            .map(|k| self.full[k] * self.p23[k] * dist[k])
            .sum::<f64>()
    }

    /// Writes `dy/dt` for the flat state `y`.
    pub fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.grid.n();
        let h = self.grid.h();
        let (m, rest) = y.split_at(n + 1);
        let (w, aux) = rest.split_at(n + 1);
        let aux = Auxiliaries::from_slice(aux);
        let c = &self.coeffs;

        let (phi, vp) = checked_phi_and_vp(c, &aux)?;
        let s = aux.psi + 1.0;
        let s23 = s.powf(2.0 / 3.0);
        let grow = c.d * phi * s23;
        let poly = c.p * aux.psi / vp;
        let coag = s.powf(14.0 / 3.0);

        let (dm, rest) = dy.split_at_mut(n + 1);
        let (dw, daux) = rest.split_at_mut(n + 1);

        if self.freeze {
            dm.fill(0.0);
            dw.fill(0.0);
        } else {
            let mut gmax: f64 = 0.0;
            for k in 0..=n {
                self.g[k] = grow * self.p23[k] + poly * self.grid.node(k);
                self.dg[k] = 2.0 / 3.0 * grow * self.inv_cbrt[k] + poly;
                gmax = gmax.max(self.g[k].abs());
            }
            self.g_max = self.g_max.max(gmax);

            fd4_into(m, h, &mut self.deriv)?;
            self.op.apply(m, c.a_m * coag, &mut self.gain, &mut self.loss);
            let nuc = c.n * phi;
            dm[0] = 0.0;
            for k in 1..=n {
                dm[k] = -self.g[k] * self.deriv[k] - (self.dg[k] + c.mu_m) * m[k]
                    + nuc * self.gauss[k]
                    + self.gain[k]
                    - self.loss[k];
            }

            fd4_into(w, h, &mut self.deriv)?;
            self.op.apply(w, c.a_w * coag, &mut self.gain, &mut self.loss);
            dw[0] = 0.0;
            for k in 1..=n {
                dw[k] = -self.g[k] * self.deriv[k] - self.dg[k] * w[k] + c.mu_w * m[k] + self.gain[k]
                    - self.loss[k];
            }
        }

        let sig_m = self.sigma(m, s23);
        let sig_w = self.sigma(w, s23);
        daux[0] = poly * (aux.v_mat + c.mat_pol1) - phi * (c.mat_s + c.mat_dm * sig_m + c.mat_dw * sig_w);
        daux[1] = poly * aux.v_cm + phi * (c.m_s + c.d * sig_m) - c.mu_m * aux.v_cm;
        daux[2] = poly * aux.v_cw + c.d * phi * sig_w + c.mu_w * aux.v_cm;
        let conv = c.pol2_p * aux.psi / s;
        daux[3] = -conv * (aux.psi + c.psi_r) / (aux.v_pol2 + c.pol2_pol1);
        daux[4] = conv;

        if let Some(i) = dy.iter().position(|v| !v.is_finite()) {
            let term = if i <= n {
                format!("dm[{i}]")
            } else if i <= 2 * n + 1 {
                format!("dw[{}]", i - n - 1)
            } else {
                format!("d{}", Auxiliaries::NAMES[i - 2 * n - 2])
            };
            return Err(Error::NonFinite {
                step: 0,
                time: t,
                detail: format!("{term} evaluated to {}", dy[i]),
                state: y.to_vec(),
            });
        }
        Ok(())
    }
}

/// Time derivative of `state`, allocating a fresh system.
pub fn assemble_rhs(coeffs: &LatexCoefficients, grid: &Grid, state: &PbeState, t: f64) -> Result<PbeState> {
    grid.check_len(&state.m)?;
    grid.check_len(&state.w)?;
    let mut sys = PbeSystem::new(coeffs.clone(), *grid)?;
    let y = state.to_vec();
    let mut dy = vec![0.0; y.len()];
    sys.rhs(t, &y, &mut dy)?;
    Ok(PbeState::from_slice(&dy, grid.n()))
}

/// What to do when a distribution reaches the last grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncationPolicy {
    /// Stop with [`Error::Truncation`].
    #[default]
    Abort,
    /// Record the first occurrence in the report and continue.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Grid intervals `N`.
    pub n: usize,
    pub v_max: f64,
    pub t_max: f64,
    /// Time steps `M`.
    pub steps: usize,
    /// Record diagnostics every this many steps (the last step is always recorded).
    pub sample_every: usize,
    #[serde(default)]
    pub truncation: TruncationPolicy,
    /// Keep `m`, `w` at every sample, not just at the end.
    #[serde(default = "yes")]
    pub snapshots: bool,
}

fn yes() -> bool {
    true
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.sample_every == 0 {
            return Err(Error::domain("steps and sample_every must be positive"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::domain("t_max must be positive"));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.t_max / self.steps as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationEvent {
    pub phase: String,
    pub step: usize,
    pub time: f64,
    /// `dist_N / max dist` when first exceeding [`TRUNCATION_RATIO`].
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub m: Vec<f64>,
    pub w: Vec<f64>,
}

/// Everything a run records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimConfig,
    pub h: f64,
    pub tau: f64,
    pub times: Vec<f64>,
    pub aux: Vec<Auxiliaries>,
    /// Discrete first moments `∫ φ m`, `∫ φ w` at the sampled times.
    pub f_m: Vec<f64>,
    pub f_w: Vec<f64>,
    pub eps_m: Option<Vec<f64>>,
    pub eps_w: Option<Vec<f64>>,
    /// Extremes over every node and every step.
    pub min_m: f64,
    pub max_m: f64,
    pub min_w: f64,
    pub max_w: f64,
    /// `τ · max|g| / h` over the run.
    pub max_cfl: f64,
    pub truncation: Option<TruncationEvent>,
    pub snapshots: Vec<Snapshot>,
    pub final_m: Vec<f64>,
    pub final_w: Vec<f64>,
}

impl SimulationReport {
    pub fn max_eps_m(&self) -> Option<f64> {
        self.eps_m.as_ref().map(|e| e.iter().copied().fold(0.0, f64::max))
    }

    pub fn max_eps_w(&self) -> Option<f64> {
        self.eps_w.as_ref().map(|e| e.iter().copied().fold(0.0, f64::max))
    }

    /// `min ≥ −tol · max` for both distributions.
    pub fn non_negative_within(&self, tol: f64) -> bool {
        self.min_m >= -tol * self.max_m && self.min_w >= -tol * self.max_w
    }
}

/// `∫ f dt` over samples: Simpson panels on interval pairs, trapezoid on an odd tail.
fn time_integral(t: &[f64], f: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < t.len() {
        let h0 = t[i + 1] - t[i];
        let h1 = t[i + 2] - t[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0
            * ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if i + 1 < t.len() {
        total += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
    }
    total
}

fn relative_error(times: &[f64], v: &[f64], f: &[f64]) -> Option<Vec<f64>> {
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let den = time_integral(times, &sq).sqrt();
    if !(den > 0.0 && den.is_finite()) {
        return None;
    }
    Some(v.iter().zip(f).map(|(a, b)| (a - b).abs() / den).collect())
}

/// `ε(t) = |V(t) − F(t)| / (∫ V² dt)^{1/2}` for both phases; `None` when the denominator vanishes.
pub fn error_series(report: &SimulationReport) -> (Option<Vec<f64>>, Option<Vec<f64>>) {
    let v_cm: Vec<f64> = report.aux.iter().map(|a| a.v_cm).collect();
    let v_cw: Vec<f64> = report.aux.iter().map(|a| a.v_cw).collect();
    (
        relative_error(&report.times, &v_cm, &report.f_m),
        relative_error(&report.times, &v_cw, &report.f_w),
    )
}

fn extremes(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)))
}

/// Runs from the empty initial state.
pub fn simulate(coeffs: &LatexCoefficients, config: &SimConfig) -> Result<SimulationReport> {
    let grid = Grid::new(config.n, config.v_max)?;
    let system = PbeSystem::new(coeffs.clone(), grid)?;
    let state = PbeState::initial(coeffs, &grid);
    simulate_from(system, state, config)
}

/// Runs a prepared system from an arbitrary state.
pub fn simulate_from(mut system: PbeSystem, state: PbeState, config: &SimConfig) -> Result<SimulationReport> {
    config.validate()?;
    let grid = *system.grid();
    if grid.n() != config.n {
        return Err(Error::Size("system grid differs from the configured N".into()));
    }
    grid.check_len(&state.m)?;
    grid.check_len(&state.w)?;
    let n = grid.n();
    let tau = config.tau();
    let mut y = state.to_vec();
    let mut stepper = Rk4::new(y.len());

    let mut times = Vec::new();
    let mut aux = Vec::new();
    let mut f_m = Vec::new();
    let mut f_w = Vec::new();
    let mut snapshots = Vec::new();
    let (mut min_m, mut max_m) = extremes(&y[..=n]);
    let (mut min_w, mut max_w) = extremes(&y[n + 1..2 * n + 2]);
    let mut truncation = None;

    let mut record = |t: f64, y: &[f64], sys: &PbeSystem| {
        let (m, w) = (&y[..=n], &y[n + 1..2 * n + 2]);
        times.push(t);
        aux.push(Auxiliaries::from_slice(&y[2 * n + 2..]));
        f_m.push(sys.first_moment(m));
        f_w.push(sys.first_moment(w));
        if config.snapshots {
            snapshots.push(Snapshot {
                time: t,
                m: m.to_vec(),
                w: w.to_vec(),
            });
        }
    };
    record(0.0, &y, &system);

    for step in 0..config.steps {
        let t = step as f64 * tau;
        let mut rhs = |t: f64, y: &[f64], dy: &mut [f64]| system.rhs(t, y, dy);
        stepper.step(&mut rhs, t, &mut y, tau).map_err(|e| match e {
            Error::NonFinite { time, detail, state, .. } => Error::NonFinite {
                step,
                time,
                detail,
                state,
            },
            other => other,
        })?;
        let t_next = if step + 1 == config.steps {
            config.t_max
        } else {
            (step + 1) as f64 * tau
        };
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                step,
                time: t_next,
                detail: format!("state component {i} overflowed"),
                state: y.clone(),
            });
        }
        // boundary values are never evolved
        debug_assert!(y[0] == 0.0 && y[n + 1] == 0.0);

        let (lo, hi) = extremes(&y[..=n]);
        min_m = min_m.min(lo);
        max_m = max_m.max(hi);
        let (lo_w, hi_w) = extremes(&y[n + 1..2 * n + 2]);
        min_w = min_w.min(lo_w);
        max_w = max_w.max(hi_w);

        if truncation.is_none() {
            for (phase, tail, peak) in [("m", y[n], hi), ("w", y[2 * n + 1], hi_w)] {
                if peak > 0.0 && tail.abs() > TRUNCATION_RATIO * peak {
                    let event = TruncationEvent {
                        phase: phase.to_string(),
                        step,
                        time: t_next,
                        ratio: tail.abs() / peak,
                    };
                    if config.truncation == TruncationPolicy::Abort {
                        return Err(Error::Truncation {
                            phase: event.phase,
                            step,
                            time: t_next,
                            ratio: event.ratio,
                        });
                    }
                    truncation = Some(event);
                    break;
                }
            }
        }

        if (step + 1) % config.sample_every == 0 || step + 1 == config.steps {
            record(t_next, &y, &system);
        }
    }

    let final_state = PbeState::from_slice(&y, n);
    let mut report = SimulationReport {
        config: config.clone(),
        h: grid.h(),
        tau,
        times,
        aux,
        f_m,
        f_w,
        eps_m: None,
        eps_w: None,
        min_m,
        max_m,
        min_w,
        max_w,
        max_cfl: tau * system.g_max / grid.h(),
        truncation,
        snapshots,
        final_m: final_state.m,
        final_w: final_state.w,
    };
    let (em, ew) = error_series(&report);
    report.eps_m = em;
    report.eps_w = ew;
    Ok(report)
}

/// Coefficients and run window of a latex experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub theta: Vec<f64>,
    pub coeffs: LatexCoefficients,
    pub config: SimConfig,
}

/// Latex run over `[0, 10^-16 L] × [0, 450 s]` expressed in the chosen factors.
///
/// Desk scale uses `n = 200`, `steps = 10 n`.
pub fn latex_scenario(
    params: &LatexParams,
    which: LatexTheta,
    n: usize,
    steps: usize,
) -> Result<Scenario> {
    let latex = build_latex(params);
    let sol = latex_theta(&latex, which)?;
    let coeffs = LatexCoefficients::from_scaling(&latex, &sol.lambdas)?;
    let config = SimConfig {
        n,
        v_max: DIMENSIONAL_V_MAX / sol.theta[0],
        t_max: DIMENSIONAL_T_MAX / sol.theta[1],
        steps,
        sample_every: (steps / 100).max(1),
        truncation: TruncationPolicy::Warn,
        snapshots: true,
    };
    Ok(Scenario {
        theta: sol.theta,
        coeffs,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eucl() -> Scenario {
        latex_scenario(&LatexParams::polymat_2018(), LatexTheta::Eucl, 40, 200).unwrap()
    }

    #[test]
    fn scenario_window() {
        let s = latex_scenario(&LatexParams::polymat_2018(), LatexTheta::Eucl, 200, 2000).unwrap();
        assert!((s.config.v_max - 9.707).abs() < 0.01);
        assert!((s.config.t_max - 0.2012).abs() < 1e-3);
        let t = latex_scenario(&LatexParams::polymat_2018(), LatexTheta::Test, 200, 2000).unwrap();
        assert!((t.config.v_max / 1.01e4 - 1.0).abs() < 0.02);
        assert!((t.config.t_max - 0.334).abs() < 2e-3);
    }

    #[test]
    fn initial_derivative_only_moves_psi() {
        let s = eucl();
        let grid = Grid::new(s.config.n, s.config.v_max).unwrap();
        let st = PbeState::initial(&s.coeffs, &grid);
        let d = assemble_rhs(&s.coeffs, &grid, &st, 0.0).unwrap();
        assert!(d.m.iter().chain(&d.w).all(|x| *x == 0.0));
        let c = &s.coeffs;
        let expect = c.pol2_p * c.psi_bar / (c.psi_bar + 1.0);
        assert!((d.aux.v_pol2 - expect).abs() < 1e-15);
        assert!(d.aux.psi < 0.0);
        // polymer appears in the matrix even before Φ switches on
        assert!(d.aux.v_mat > 0.0);
        assert_eq!((d.aux.v_cm, d.aux.v_cw), (0.0, 0.0));
    }

    #[test]
    fn no_nucleation_keeps_distributions_zero() {
        // λ_n λ_c = λ^m_s, so switching nucleation off removes both
        let mut s = eucl();
        s.coeffs.n = 0.0;
        s.coeffs.m_s = 0.0;
        let r = simulate(&s.coeffs, &s.config).unwrap();
        assert!(r.final_m.iter().chain(&r.final_w).all(|x| *x == 0.0));
        assert_eq!((r.min_m, r.max_m), (0.0, 0.0));
        assert!(r.eps_m.is_none());
    }

    #[test]
    fn runs_are_deterministic() {
        let s = eucl();
        let a = simulate(&s.coeffs, &s.config).unwrap();
        let b = simulate(&s.coeffs, &s.config).unwrap();
        assert_eq!(a, b);
        assert!(a.snapshots.iter().all(|sn| sn.m[0] == 0.0 && sn.w[0] == 0.0));
    }

    #[test]
    fn abort_policy_stops_on_tail_mass() {
        let mut s = eucl();
        s.config.truncation = TruncationPolicy::Abort;
        let mut sys = PbeSystem::new(s.coeffs.clone(), Grid::new(s.config.n, s.config.v_max).unwrap()).unwrap();
        let mut st = PbeState::initial(&s.coeffs, sys.grid());
        let n = s.config.n;
        for k in 1..=n {
            st.m[k] = 1.0;
        }
        sys.g_max = 0.0;
        let err = simulate_from(sys, st, &s.config).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn time_integral_rules() {
        let t: Vec<f64> = (0..=4).map(|i| i as f64 * 0.5).collect();
        let f: Vec<f64> = t.iter().map(|x| x * x).collect();
        assert!((time_integral(&t, &f) - 8.0 / 3.0).abs() < 1e-14);
        let t = vec![0.0, 1.0, 2.0, 2.5];
        let f = vec![1.0; 4];
        assert!((time_integral(&t, &f) - 2.5).abs() < 1e-14);
        let t = vec![0.0, 0.3, 1.0];
        let f: Vec<f64> = t.iter().map(|x| x * x).collect();
        assert!((time_integral(&t, &f) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn identical_series_give_zero_error() {
        let times = vec![0.0, 0.1, 0.2, 0.3];
        let v = vec![0.0, 1.0, 2.0, 3.0];
        assert_eq!(relative_error(&times, &v, &v).unwrap(), vec![0.0; 4]);
        assert!(relative_error(&times, &[0.0; 4], &v).is_none());
    }
}
