//! Fixed-step classical Runge–Kutta and the projectile system.

use crate::error::{Error, Result};

/// Sampled solution of an initial value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One row per entry of `times`.
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }
}

/// Reusable RK4 stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `y` in place from `t` to `t + tau`.
    pub fn step<F>(&mut self, rhs: &mut F, t: f64, y: &mut [f64], tau: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let n = y.len();
        debug_assert_eq!(n, self.k1.len());
        rhs(t, y, &mut self.k1)?;
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * tau * self.k1[i];
        }
        rhs(t + 0.5 * tau, &self.tmp, &mut self.k2)?;
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * tau * self.k2[i];
        }
        rhs(t + 0.5 * tau, &self.tmp, &mut self.k3)?;
        for i in 0..n {
            self.tmp[i] = y[i] + tau * self.k3[i];
        }
        rhs(t + tau, &self.tmp, &mut self.k4)?;
        for i in 0..n {
            y[i] += tau / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        Ok(())
    }
}

fn check_finite(step: usize, t: f64, y: &[f64]) -> Result<()> {
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            step,
            time: t,
            detail: format!("state component {i} is {}", y[i]),
            state: y.to_vec(),
        });
    }
    Ok(())
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` in `steps` equal RK4 steps.
///
/// The closure writes the derivative into its third argument. Both endpoints
/// are included in the returned trajectory.
pub fn rk4_integrate<F>(mut rhs: F, y0: &[f64], t0: f64, t1: f64, steps: usize) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::domain(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    if steps == 0 {
        return Err(Error::domain("steps must be at least 1"));
    }
    check_finite(0, t0, y0)?;
    let tau = (t1 - t0) / steps as f64;
    let mut stepper = Rk4::new(y0.len());
    let mut y = y0.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(y.clone());
    for s in 0..steps {
        let t = t0 + s as f64 * tau;
        stepper.step(&mut rhs, t, &mut y, tau).map_err(|e| match e {
            Error::NonFinite { detail, .. } => Error::NonFinite {
                step: s,
                time: t,
                detail,
                state: y.clone(),
            },
            other => other,
        })?;
        let t_next = if s + 1 == steps { t1 } else { t0 + (s + 1) as f64 * tau };
        check_finite(s + 1, t_next, &y).map_err(|e| match e {
            Error::NonFinite { detail, .. } => Error::NonFinite {
                step: s,
                time: t,
                detail: format!("{detail} after the step"),
                state: states.last().cloned().unwrap_or_default(),
            },
            other => other,
        })?;
        times.push(t_next);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

/// Scaled projectile `w1' = w2`, `w2' = −λ1/(1 + λ2 w1)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectileSystem {
    pub lambdas: [f64; 3],
}

impl ProjectileSystem {
    pub fn new(lambdas: [f64; 3]) -> Result<Self> {
        if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::domain(format!("projectile needs positive lambdas, got {lambdas:?}")));
        }
        Ok(ProjectileSystem { lambdas })
    }

    /// `(ξ(0), ξ'(0)) = (0, λ3)`.
    pub fn initial_state(&self) -> [f64; 2] {
        [0.0, self.lambdas[2]]
    }

    pub fn tangent(&self, w1: f64, w2: f64) -> Result<(f64, f64)> {
        let den = 1.0 + self.lambdas[1] * w1;
        if den == 0.0 {
            return Err(Error::SingularEvaluation(format!(
                "1 + lambda_2 * w1 vanishes at w1 = {w1}"
            )));
        }
        Ok((w2, -self.lambdas[0] / (den * den)))
    }

    /// Right-hand side in the form taken by [`rk4_integrate`].
    pub fn rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) -> Result<()> + '_ {
        move |_t, y, dy| {
            let (a, b) = self.tangent(y[0], y[1])?;
            dy[0] = a;
            dy[1] = b;
            Ok(())
        }
    }
}

/// Convenience wrapper matching the usual factory shape.
pub fn projectile_system(lambdas: [f64; 3]) -> Result<ProjectileSystem> {
    ProjectileSystem::new(lambdas)
}

/// One lattice sample of the phase-space flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub w1: f64,
    pub w2: f64,
    pub dw1: f64,
    pub dw2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub samples: Vec<FlowSample>,
    /// Lattice points where the tangent is undefined.
    pub singular: Vec<(f64, f64)>,
}

fn lattice(range: (f64, f64), n: usize, i: usize) -> f64 {
    range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
}

/// Samples tangent vectors on an `counts.0 × counts.1` lattice, `w1` varying slowest.
pub fn flow_field(
    system: &ProjectileSystem,
    w1_range: (f64, f64),
    w2_range: (f64, f64),
    counts: (usize, usize),
) -> Result<FlowField> {
    if counts.0 < 2 || counts.1 < 2 {
        return Err(Error::domain("flow lattice needs at least two points per axis"));
    }
    for r in [w1_range, w2_range] {
        if !(r.1 > r.0) || !r.0.is_finite() || !r.1.is_finite() {
            return Err(Error::domain(format!("invalid range {r:?}")));
        }
    }
    let mut samples = Vec::with_capacity(counts.0 * counts.1);
    let mut singular = Vec::new();
    for i in 0..counts.0 {
        let w1 = lattice(w1_range, counts.0, i);
        for j in 0..counts.1 {
            let w2 = lattice(w2_range, counts.1, j);
            match system.tangent(w1, w2) {
                Ok((dw1, dw2)) if dw2.is_finite() => samples.push(FlowSample { w1, w2, dw1, dw2 }),
                Ok(_) | Err(Error::SingularEvaluation(_)) => singular.push((w1, w2)),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(FlowField { samples, singular })
}

/// Phase-space window `[0, x_max/x_c] × [−v_max t_c/x_c, v_max t_c/x_c]`.
pub fn scaled_ranges(t_c: f64, x_c: f64, x_max: f64, v_max: f64) -> ((f64, f64), (f64, f64)) {
    let v = v_max * t_c / x_c;
    ((0.0, x_max / x_c), (-v, v))
}
