//! `optscale` command line: `scale`, `enumerate`, `projectile`, `pbe`.
//!
//! Exit codes: 0 success, 1 I/O or other unexpected failure, 2 degenerate
//! exponent structure, 3 enumeration cap exceeded, 4 non-negativity guard
//! violated on the least-squares latex run, 5 solver abort, 64 bad usage or
//! configuration.

use crate::config::{LambdaFile, RunConfig};
use crate::error::{Error, Result};
use crate::models::{
    build_latex, build_ldg, build_projectile, build_schrodinger, LatexTheta, Preset, ProjectileParams,
};
use crate::ode::{flow_field, rk4_integrate, scaled_ranges, ProjectileSystem, Trajectory};
use crate::output::{fmt_f64, write_summary, CsvOut, RunManifest};
use crate::pbe::{latex_scenario, simulate, LatexCoefficients, SimConfig, SimulationReport, TruncationPolicy};
use crate::scaling::{
    anneal_minimize, enumerate_traditional, solve_euclidean, solve_subset, AnnealConfig, CostKind,
    ScalingProblem, ScalingSolution, DEFAULT_ENUMERATION_CAP,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_NEGATIVE: i32 = 4;
pub const EXIT_SOLVER: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

/// Relative tolerance of the non-negativity guard.
pub const NON_NEGATIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "optscale", version, about = "Optimal scaling factors and a latex PBE solver")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for annealing.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute scaling factors for a problem.
    Scale(ScaleArgs),
    /// Try every traditional scaling of a problem.
    Enumerate(EnumerateArgs),
    /// Integrate the scaled projectile and sample its phase-space flow.
    Projectile(ProjectileArgs),
    /// Integrate the dimensionless latex population balance.
    Pbe(PbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleMethod {
    Euclid,
    AnnealMax,
    AnnealEucl,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// projectile, schrodinger, ldg or latex; the config's [problem] when omitted.
    #[arg(long)]
    pub preset: Option<String>,
    /// Size-separation decades for the ldg preset.
    #[arg(long)]
    pub q: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "euclid")]
    pub method: ScaleMethod,
    #[arg(long)]
    pub max_evals: Option<u64>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub step_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Refuse when more subsets than this would be visited.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjectileMethod {
    /// λ1 = λ2 = 1
    A,
    /// λ2 = λ3 = 1
    B,
    /// λ1 = λ3 = 1
    C,
    /// least squares
    D,
    /// annealed max norm
    E,
    /// unit factors (dimensional run)
    Unit,
}

#[derive(Debug, Args)]
pub struct ProjectileArgs {
    #[arg(long, value_enum, default_value = "d", conflicts_with = "theta")]
    pub method: ProjectileMethod,
    /// Explicit factors `t_c,x_c`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub theta: Option<Vec<f64>>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Dimensional end time [s].
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Lattice points per flow axis.
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    /// Compare against the dimensional run and report the largest deviation.
    #[arg(long)]
    pub round_trip: bool,
}

#[derive(Debug, Args)]
pub struct PbeArgs {
    #[arg(long, value_enum)]
    pub theta: Option<ThetaChoice>,
    /// Desk-scale preset: N = 200, M = 10 N.
    #[arg(long)]
    pub desk: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Explicit coefficients (TOML with a [coefficients] table).
    #[arg(long)]
    pub lambda_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub truncation: Option<TruncationChoice>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaChoice {
    Eucl,
    Test,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TruncationChoice {
    Abort,
    Warn,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Stable mapping from errors to exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DegenerateExponents { .. } => EXIT_DEGENERATE,
        Error::CombinationCap { .. } => EXIT_CAP,
        Error::NonFinite { .. }
        | Error::StateCorruption(_)
        | Error::Truncation { .. }
        | Error::SingularEvaluation(_) => EXIT_SOLVER,
        Error::Config(_) | Error::Domain(_) | Error::Size(_) | Error::UnsolvableCombination { .. } => {
            EXIT_USAGE
        }
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_FAILURE,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Scale(a) => cmd_scale(cli, &config, a),
        Command::Enumerate(a) => cmd_enumerate(cli, &config, a),
        Command::Projectile(a) => cmd_projectile(cli, &config, a),
        Command::Pbe(a) => cmd_pbe(cli, &config, a),
    }
}

fn resolve_problem(config: &RunConfig, args: &ProblemArgs) -> Result<(String, ScalingProblem)> {
    match &args.preset {
        Some(name) => {
            let preset = Preset::from_name(name)?;
            let p = &config.params;
            let problem = match preset {
                Preset::Projectile => build_projectile(&p.projectile),
                Preset::Schrodinger => build_schrodinger(&p.schrodinger),
                Preset::Ldg => {
                    let mut ldg = p.ldg.clone();
                    if let Some(q) = args.q {
                        ldg.q = q;
                    }
                    ldg.validate().map_err(|e| Error::Config(e.to_string()))?;
                    build_ldg(&ldg)
                }
                Preset::Latex => build_latex(&p.latex).problem,
            };
            Ok((preset.name().to_string(), problem))
        }
        None => config
            .problem
            .clone()
            .map(|p| ("config".to_string(), p))
            .ok_or_else(|| Error::Config("give --preset or a [problem] table in --config".into())),
    }
}

fn seed_of(cli: &Cli, config: &RunConfig) -> u64 {
    cli.seed
        .or(config.anneal.as_ref().map(|a| a.seed))
        .unwrap_or(0)
}

fn solution_header(problem: &ScalingProblem) -> Vec<String> {
    let mut h = vec!["method_tag".to_string()];
    h.extend((1..=problem.n_factors()).map(|j| format!("factor_{j}")));
    h.extend((1..=problem.n_coefficients()).map(|i| format!("lambda_{i}")));
    h.push("cost".into());
    h.push("ratio".into());
    h
}

fn solution_row(s: &ScalingSolution) -> Vec<String> {
    let mut r = vec![s.method_tag.clone()];
    r.extend(s.theta.iter().map(|x| fmt_f64(*x)));
    r.extend(s.lambdas.iter().map(|x| fmt_f64(*x)));
    r.push(fmt_f64(s.cost));
    r.push(fmt_f64(s.ratio));
    r
}

fn problem_json(problem: &ScalingProblem) -> Value {
    json!({
        "factors": problem.factor_names(),
        "labels": problem.monomials().iter().map(|m| m.label.clone()).collect::<Vec<_>>(),
    })
}

/// `scale`: one scaling solution to CSV and stdout.
pub fn cmd_scale(cli: &Cli, config: &RunConfig, args: &ScaleArgs) -> Result<i32> {
    let (source, problem) = resolve_problem(config, &args.problem)?;
    let seed = seed_of(cli, config);
    let mut anneal = config.anneal.clone().unwrap_or_default();
    anneal.seed = seed;
    if let Some(v) = args.max_evals {
        anneal.max_evaluations = v;
    }
    if let Some(v) = args.temperature {
        anneal.initial_temperature = v;
    }
    if let Some(v) = args.step_scale {
        anneal.step_scale = v;
    }
    let started = Instant::now();
    let (method, sol) = match args.method {
        ScaleMethod::Euclid => ("euclid", solve_euclidean(&problem)?),
        ScaleMethod::AnnealMax => ("anneal-max", anneal_minimize(&problem, CostKind::Max, &anneal)?),
        ScaleMethod::AnnealEucl => ("anneal-eucl", anneal_minimize(&problem, CostKind::Euclid, &anneal)?),
    };
    let elapsed = started.elapsed().as_secs_f64();

    let resolved = json!({
        "source": source,
        "method": method,
        "q": args.problem.q,
        "anneal": if args.method == ScaleMethod::Euclid { Value::Null } else { serde_json::to_value(&anneal)? },
        "problem": problem_json(&problem),
    });
    let manifest = RunManifest::new("scale", resolved, &cli.out, seed);
    let mut csv = CsvOut::create(&cli.out.join("scale.csv"), &manifest, &solution_header(&problem))?;
    csv.row(solution_row(&sol))?;
    let csv_path = csv.finish()?;
    write_summary(
        &cli.out.join("scale_summary.json"),
        &manifest,
        json!({ "solution": sol, "wall_time_s": elapsed }),
    )?;

    println!("method  {}", sol.method_tag);
    for (name, t) in problem.factor_names().iter().zip(&sol.theta) {
        println!("theta   {name} = {t:.6e}");
    }
    for (m, l) in problem.monomials().iter().zip(&sol.lambdas) {
        println!("lambda  {} = {l:.6e}", m.label);
    }
    println!("cost    {:.6e}", sol.cost);
    println!("ratio   {:.6e}", sol.ratio);
    println!("wrote   {}", csv_path.display());
    Ok(EXIT_OK)
}

/// `enumerate`: every solvable traditional scaling, sorted by ratio.
pub fn cmd_enumerate(cli: &Cli, config: &RunConfig, args: &EnumerateArgs) -> Result<i32> {
    let (source, problem) = resolve_problem(config, &args.problem)?;
    let started = Instant::now();
    let e = match enumerate_traditional(&problem, args.cap) {
        Err(err @ Error::CombinationCap { .. }) => {
            eprintln!("refused: {err}");
            return Ok(EXIT_CAP);
        }
        other => other?,
    };
    let elapsed = started.elapsed().as_secs_f64();
    let resolved = json!({ "source": source, "cap": args.cap.to_string(), "q": args.problem.q, "problem": problem_json(&problem) });
    let manifest = RunManifest::new("enumerate", resolved, &cli.out, seed_of(cli, config));

    let mut header = vec!["kind".to_string(), "rank".into(), "subset".into(), "ratio".into()];
    header.extend((1..=problem.n_factors()).map(|j| format!("factor_{j}")));
    let mut csv = CsvOut::create(&cli.out.join("enumerate.csv"), &manifest, &header)?;
    let subset_text = |s: &[usize]| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
    let mut write = |kind: &str, rank: usize, s: &[usize], sol: &ScalingSolution| -> Result<()> {
        let mut r = vec![kind.to_string(), rank.to_string(), subset_text(s), fmt_f64(sol.ratio)];
        r.extend(sol.theta.iter().map(|x| fmt_f64(*x)));
        csv.row(r)
    };
    for (rank, (s, sol)) in e.entries.iter().enumerate() {
        write("subset", rank + 1, s, sol)?;
    }
    if let (Some(best), Some(worst)) = (e.best(), e.worst()) {
        write("theta_m", 1, &best.0, &best.1)?;
        write("theta_M", e.entries.len(), &worst.0, &worst.1)?;
    }
    let csv_path = csv.finish()?;
    let fraction = e.fraction_above(1e10);
    write_summary(
        &cli.out.join("enumerate_summary.json"),
        &manifest,
        json!({
            "candidates": e.candidates.to_string(),
            "solvable": e.entries.len(),
            "fraction_ratio_above_1e10": fraction,
            "theta_m": e.best().map(|b| json!({"subset": subset_text(&b.0), "ratio": b.1.ratio, "theta": b.1.theta})),
            "theta_M": e.worst().map(|b| json!({"subset": subset_text(&b.0), "ratio": b.1.ratio, "theta": b.1.theta})),
            "wall_time_s": elapsed,
        }),
    )?;
    println!("candidates        {}", e.candidates);
    println!("solvable          {}", e.entries.len());
    println!("fraction r > 1e10 {fraction:.4}");
    if let (Some(b), Some(w)) = (e.best(), e.worst()) {
        println!("min ratio         {:.6e} (subset {})", b.1.ratio, subset_text(&b.0));
        println!("max ratio         {:.6e} (subset {})", w.1.ratio, subset_text(&w.0));
    }
    println!("wrote             {}", csv_path.display());
    Ok(EXIT_OK)
}

/// Factors of a projectile method.
pub fn projectile_solution(
    params: &ProjectileParams,
    method: ProjectileMethod,
    anneal: &AnnealConfig,
) -> Result<ScalingSolution> {
    let p = build_projectile(params);
    match method {
        ProjectileMethod::A => solve_subset(&p, &[0, 1]),
        ProjectileMethod::B => solve_subset(&p, &[1, 2]),
        ProjectileMethod::C => solve_subset(&p, &[0, 2]),
        ProjectileMethod::D => solve_euclidean(&p),
        ProjectileMethod::E => anneal_minimize(&p, CostKind::Max, anneal),
        ProjectileMethod::Unit => p.solution_at(vec![1.0, 1.0], CostKind::Euclid, "unit"),
    }
}

/// Scaled run mapped back to dimensional `(t, x)`, plus the deviation from a direct dimensional run.
pub fn projectile_round_trip(
    params: &ProjectileParams,
    theta: &[f64],
    t_max: f64,
    steps: usize,
) -> Result<(Trajectory, f64)> {
    let problem = build_projectile(params);
    let l = problem.eval_coefficients(theta)?;
    let sys = ProjectileSystem::new([l[0], l[1], l[2]])?;
    let scaled = rk4_integrate(sys.rhs(), &sys.initial_state(), 0.0, t_max / theta[0], steps)?;
    let dim_sys = ProjectileSystem::new([params.g, 1.0 / params.r, params.v0])?;
    let dim = rk4_integrate(dim_sys.rhs(), &dim_sys.initial_state(), 0.0, t_max, steps)?;
    let scale = dim.states.iter().map(|s| s[0].abs()).fold(0.0, f64::max);
    let dev = scaled
        .states
        .iter()
        .zip(&dim.states)
        .map(|(s, d)| (theta[1] * s[0] - d[0]).abs() / scale)
        .fold(0.0, f64::max);
    Ok((scaled, dev))
}

/// `projectile`: trajectory and flow CSVs for one factor choice.
pub fn cmd_projectile(cli: &Cli, config: &RunConfig, args: &ProjectileArgs) -> Result<i32> {
    let params = &config.params.projectile;
    let seed = seed_of(cli, config);
    let mut anneal = config.anneal.clone().unwrap_or_default();
    anneal.seed = seed;
    let (label, theta) = match &args.theta {
        Some(t) => {
            if t.len() != 2 {
                return Err(Error::Config("--theta takes t_c,x_c".into()));
            }
            ("explicit".to_string(), t.clone())
        }
        None => {
            let sol = projectile_solution(params, args.method, &anneal)?;
            (format!("{:?}", args.method).to_lowercase(), sol.theta)
        }
    };
    let problem = build_projectile(params);
    let lambdas = problem.eval_coefficients(&theta)?;
    let steps = args.steps.or(config.projectile.steps).unwrap_or(2000);
    let t_max = args.t_max.or(config.projectile.t_max).unwrap_or(5.0);
    let x_max = config.projectile.x_max.unwrap_or(60.0);
    let v_max = config.projectile.v_max.unwrap_or(60.0);
    if args.grid < 2 {
        return Err(Error::Config("--grid needs at least 2 points".into()));
    }

    let (traj, deviation) = projectile_round_trip(params, &theta, t_max, steps)?;
    let sys = ProjectileSystem::new([lambdas[0], lambdas[1], lambdas[2]])?;
    let (r1, r2) = scaled_ranges(theta[0], theta[1], x_max, v_max);
    let flow = flow_field(&sys, r1, r2, (args.grid, args.grid))?;

    let resolved = json!({
        "method": label, "theta": theta, "lambdas": lambdas, "steps": steps,
        "t_max": t_max, "x_max": x_max, "v_max": v_max, "grid": args.grid, "params": params,
    });
    let manifest = RunManifest::new("projectile", resolved, &cli.out, seed);
    let header: Vec<String> = ["tau", "w1", "w2", "t", "x", "v"].iter().map(|s| s.to_string()).collect();
    let mut csv = CsvOut::create(&cli.out.join("projectile_trajectory.csv"), &manifest, &header)?;
    for (tau, s) in traj.times.iter().zip(&traj.states) {
        csv.row([
            fmt_f64(*tau),
            fmt_f64(s[0]),
            fmt_f64(s[1]),
            fmt_f64(tau * theta[0]),
            fmt_f64(s[0] * theta[1]),
            fmt_f64(s[1] * theta[1] / theta[0]),
        ])?;
    }
    csv.finish()?;
    let header: Vec<String> = ["w1", "w2", "dw1", "dw2"].iter().map(|s| s.to_string()).collect();
    let mut csv = CsvOut::create(&cli.out.join("projectile_flow.csv"), &manifest, &header)?;
    for p in &flow.samples {
        csv.row([fmt_f64(p.w1), fmt_f64(p.w2), fmt_f64(p.dw1), fmt_f64(p.dw2)])?;
    }
    csv.finish()?;
    let x_peak = traj.states.iter().map(|s| s[0]).fold(f64::MIN, f64::max) * theta[1];
    write_summary(
        &cli.out.join("projectile_summary.json"),
        &manifest,
        json!({
            "max_height_m": x_peak,
            "round_trip_max_rel_deviation": deviation,
            "singular_points": flow.singular,
            "w1_range": [r1.0, r1.1],
            "w2_range": [r2.0, r2.1],
        }),
    )?;
    println!("theta        t_c = {:.6e}, x_c = {:.6e}", theta[0], theta[1]);
    println!("lambda       {:.6e} {:.6e} {:.6e}", lambdas[0], lambdas[1], lambdas[2]);
    println!("max height   {x_peak:.6e} m");
    if args.round_trip {
        println!("round trip   max relative deviation {deviation:.3e}");
    }
    if !flow.singular.is_empty() {
        println!("singular     {} flow points", flow.singular.len());
    }
    Ok(EXIT_OK)
}

/// Resolved inputs of a `pbe` run.
struct PbeRun {
    theta_label: &'static str,
    theta: Option<Vec<f64>>,
    coeffs: LatexCoefficients,
    config: SimConfig,
}

fn resolve_pbe(config: &RunConfig, args: &PbeArgs) -> Result<PbeRun> {
    let sec = &config.pbe;
    let n = args.n.or(sec.n).unwrap_or(200);
    let steps = args.steps.or(sec.steps).unwrap_or(10 * n);
    let choice = match (&args.lambda_file, args.theta) {
        (Some(_), None | Some(ThetaChoice::Explicit)) => ThetaChoice::Explicit,
        (Some(_), Some(_)) => {
            return Err(Error::Config("--lambda-file implies --theta explicit".into()));
        }
        (None, Some(ThetaChoice::Explicit)) => {
            return Err(Error::Config("--theta explicit needs --lambda-file".into()));
        }
        (None, Some(t)) => t,
        (None, None) => match sec.theta {
            Some(LatexTheta::Test) => ThetaChoice::Test,
            _ => ThetaChoice::Eucl,
        },
    };
    let grid_n = if args.desk && args.n.is_none() && sec.n.is_none() { 200 } else { n };
    let base = |which| latex_scenario(&config.params.latex, which, grid_n, steps);
    let (label, theta, mut coeffs, mut sim) = match choice {
        ThetaChoice::Eucl => {
            let s = base(LatexTheta::Eucl)?;
            ("eucl", Some(s.theta), s.coeffs, s.config)
        }
        ThetaChoice::Test => {
            let s = base(LatexTheta::Test)?;
            ("test", Some(s.theta), s.coeffs, s.config)
        }
        ThetaChoice::Explicit => {
            let path = args.lambda_file.as_ref().expect("checked above");
            let lf = LambdaFile::load(path)?;
            let mut sim = base(LatexTheta::Eucl)?.config;
            if let Some(w) = lf.window {
                sim.v_max = w.v_max;
                sim.t_max = w.t_max;
            }
            ("explicit", None, lf.coefficients, sim)
        }
    };
    if let Some(v) = sec.v_max {
        sim.v_max = v;
    }
    if let Some(t) = sec.t_max {
        sim.t_max = t;
    }
    if let Some(s) = args.sample_every.or(sec.sample_every) {
        sim.sample_every = s;
    }
    sim.truncation = match args.truncation {
        Some(TruncationChoice::Abort) => TruncationPolicy::Abort,
        Some(TruncationChoice::Warn) => TruncationPolicy::Warn,
        None => sec.truncation.unwrap_or(TruncationPolicy::Warn),
    };
    if let Some(r) = sec.sigma_ratio {
        coeffs.sigma_c = Some(coeffs.lambda_c / r);
    }
    coeffs.validate().map_err(|e| Error::Config(e.to_string()))?;
    sim.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(PbeRun {
        theta_label: label,
        theta,
        coeffs,
        config: sim,
    })
}

fn write_pbe_outputs(out: &Path, manifest: &RunManifest, report: &SimulationReport) -> Result<()> {
    let header: Vec<String> = ["t", "v", "m", "w"].iter().map(|s| s.to_string()).collect();
    let mut csv = CsvOut::create(&out.join("pbe_distributions.csv"), manifest, &header)?;
    for snap in &report.snapshots {
        for (k, (m, w)) in snap.m.iter().zip(&snap.w).enumerate() {
            csv.row([fmt_f64(snap.time), fmt_f64(k as f64 * report.h), fmt_f64(*m), fmt_f64(*w)])?;
        }
    }
    csv.finish()?;

    let header: Vec<String> = [
        "t", "V_mat", "V_cm", "V_cw", "Psi", "V_pol2", "F_m", "F_w", "eps_m", "eps_w",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut csv = CsvOut::create(&out.join("pbe_diagnostics.csv"), manifest, &header)?;
    let opt = |e: &Option<Vec<f64>>, i: usize| e.as_ref().map_or(String::new(), |v| fmt_f64(v[i]));
    for (i, t) in report.times.iter().enumerate() {
        let a = report.aux[i];
        csv.row([
            fmt_f64(*t),
            fmt_f64(a.v_mat),
            fmt_f64(a.v_cm),
            fmt_f64(a.v_cw),
            fmt_f64(a.psi),
            fmt_f64(a.v_pol2),
            fmt_f64(report.f_m[i]),
            fmt_f64(report.f_w[i]),
            opt(&report.eps_m, i),
            opt(&report.eps_w, i),
        ])?;
    }
    csv.finish()?;
    Ok(())
}

/// `pbe`: run the latex population balance and write its diagnostics.
pub fn cmd_pbe(cli: &Cli, config: &RunConfig, args: &PbeArgs) -> Result<i32> {
    let run = resolve_pbe(config, args)?;
    let resolved = json!({
        "theta_choice": run.theta_label,
        "theta": run.theta,
        "coefficients": run.coeffs,
        "sigma_c": run.coeffs.sigma_c(),
        "sim": run.config,
    });
    let manifest = RunManifest::new("pbe", resolved, &cli.out, seed_of(cli, config));
    let started = Instant::now();
    let report = match simulate(&run.coeffs, &run.config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("solver aborted: {e}");
            write_summary(
                &cli.out.join("pbe_summary.json"),
                &manifest,
                json!({ "aborted": e.to_string() }),
            )?;
            return Ok(exit_code(&e).max(EXIT_SOLVER));
        }
    };
    let elapsed = started.elapsed().as_secs_f64();
    write_pbe_outputs(&cli.out, &manifest, &report)?;
    let non_negative = report.non_negative_within(NON_NEGATIVITY_TOL);
    write_summary(
        &cli.out.join("pbe_summary.json"),
        &manifest,
        json!({
            "h": report.h,
            "tau": report.tau,
            "max_cfl": report.max_cfl,
            "min_m": report.min_m,
            "max_m": report.max_m,
            "min_w": report.min_w,
            "max_w": report.max_w,
            "non_negative": non_negative,
            "non_negativity_tol": NON_NEGATIVITY_TOL,
            "max_eps_m": report.max_eps_m(),
            "max_eps_w": report.max_eps_w(),
            "truncation": report.truncation,
            "wall_time_s": elapsed,
        }),
    )?;
    println!("theta       {}", run.theta_label);
    println!("grid        N = {}, h = {:.4e}, sigma_c = {:.4e}", run.config.n, report.h, run.coeffs.sigma_c());
    println!("time        M = {}, tau = {:.4e}, max CFL = {:.3}", run.config.steps, report.tau, report.max_cfl);
    println!("m range     [{:.4e}, {:.4e}]", report.min_m, report.max_m);
    println!("w range     [{:.4e}, {:.4e}]", report.min_w, report.max_w);
    match (report.max_eps_m(), report.max_eps_w()) {
        (Some(a), Some(b)) => println!("max eps     m {a:.4e}, w {b:.4e}"),
        _ => println!("max eps     undefined (zero moments)"),
    }
    if let Some(t) = &report.truncation {
        println!(
            "warning     {} reached the grid end at t = {:.4e} (tail/max {:.2e})",
            t.phase, t.time, t.ratio
        );
    }
    if !non_negative {
        println!("negative    minima below -{NON_NEGATIVITY_TOL:e} x max");
    }
    if !non_negative && run.theta_label == "eucl" {
        return Ok(EXIT_NEGATIVE);
    }
    Ok(EXIT_OK)
}
