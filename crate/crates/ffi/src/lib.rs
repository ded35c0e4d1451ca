//! C interface to `optscale`.
//!
//! Every call returns an [`OsStatus`]; on failure the message is kept per
//! thread and read back with [`os_last_error_message`]. Handles are opaque and
//! must be released with the matching `*_free`.

use optscale::models::{build_latex, build_ldg, build_projectile, build_schrodinger, LatexParams, LatexTheta, Preset};
use optscale::pbe::{latex_scenario, simulate, SimulationReport};
use optscale::scaling::{
    anneal_minimize, solve_euclidean, solve_subset, AnnealConfig, CostKind, Monomial, ScalingProblem,
    ScalingSolution,
};
use optscale::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    CapExceeded = 4,
    SolverAbort = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

// Plain integers on input so an out-of-range value is an error, not UB.
pub const OS_COST_EUCLID: u32 = 0;
pub const OS_COST_MAX: u32 = 1;
pub const OS_THETA_EUCL: u32 = 0;
pub const OS_THETA_TEST: u32 = 1;

fn bad(what: &str, v: u32) -> (OsStatus, String) {
    (OsStatus::InvalidArgument, format!("unknown {what} {v}"))
}

/// Scaling problem handle.
pub struct OsProblem(ScalingProblem);

/// Scaling solution handle.
pub struct OsSolution(ScalingSolution);

/// PBE run handle.
pub struct OsReport(SimulationReport);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> OsStatus {
    match e {
        Error::DegenerateExponents { .. } => OsStatus::Degenerate,
        Error::CombinationCap { .. } => OsStatus::CapExceeded,
        Error::NonFinite { .. } | Error::StateCorruption(_) | Error::Truncation { .. } | Error::SingularEvaluation(_) => {
            OsStatus::SolverAbort
        }
        Error::Domain(_) | Error::Size(_) | Error::Config(_) | Error::UnsolvableCombination { .. } => {
            OsStatus::InvalidArgument
        }
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => OsStatus::Internal,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (OsStatus, String)>) -> OsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OsStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            OsStatus::Internal
        }
    }
}

fn fail(e: Error) -> (OsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OsStatus, String) {
    (OsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (OsStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), (OsStatus, String)> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn copy_into(src: &[f64], buf: *mut f64, len: usize) -> Result<(), (OsStatus, String)> {
    if len < src.len() {
        return Err((OsStatus::BufferTooSmall, format!("need {} slots, got {len}", src.len())));
    }
    if buf.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copies the last error of this thread into `buf` (NUL-terminated, truncated
/// to fit) and returns the full message length without the terminator.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn os_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a preset problem by name with default parameters.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn os_problem_preset(name: *const c_char, out: *mut *mut OsProblem) -> OsStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (OsStatus::InvalidArgument, "name is not UTF-8".to_string()))?;
        let p = match Preset::from_name(name).map_err(fail)? {
            Preset::Projectile => build_projectile(&Default::default()),
            Preset::Schrodinger => build_schrodinger(&Default::default()),
            Preset::Ldg => build_ldg(&Default::default()),
            Preset::Latex => build_latex(&LatexParams::polymat_2018()).problem,
        };
        write_out(out, OsProblem(p))
    })
}

/// Builds a problem from `n_coefficients` constants, a row-major
/// `n_coefficients × n_factors` exponent matrix and optional targets.
///
/// # Safety
/// Arrays must hold the stated number of elements; `targets` may be null.
#[no_mangle]
pub unsafe extern "C" fn os_problem_new(
    n_factors: usize,
    n_coefficients: usize,
    kappa: *const f64,
    exponents: *const f64,
    targets: *const f64,
    out: *mut *mut OsProblem,
) -> OsStatus {
    guard(|| {
        let k = slice(kappa, n_coefficients, "kappa")?;
        let a = slice(exponents, n_coefficients * n_factors, "exponents")?;
        let t = if targets.is_null() { None } else { Some(slice(targets, n_coefficients, "targets")?) };
        let monomials = (0..n_coefficients)
            .map(|i| {
                let m = Monomial::new(format!("lambda_{}", i + 1), k[i], a[i * n_factors..(i + 1) * n_factors].to_vec());
                match t {
                    Some(t) => m.with_target(t[i]),
                    None => m,
                }
            })
            .collect();
        let names = (1..=n_factors).map(|j| format!("theta_{j}")).collect();
        let p = ScalingProblem::new(names, monomials).map_err(fail)?;
        write_out(out, OsProblem(p))
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn os_problem_free(p: *mut OsProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live problem handle; `n_factors` and `n_coefficients` writable.
#[no_mangle]
pub unsafe extern "C" fn os_problem_size(p: *const OsProblem, n_factors: *mut usize, n_coefficients: *mut usize) -> OsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if n_factors.is_null() || n_coefficients.is_null() {
            return Err(null("size output"));
        }
        *n_factors = p.0.n_factors();
        *n_coefficients = p.0.n_coefficients();
        Ok(())
    })
}

/// Least-squares factors.
///
/// # Safety
/// `p` must be a live problem handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn os_solve_euclidean(p: *const OsProblem, out: *mut *mut OsSolution) -> OsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        write_out(out, OsSolution(solve_euclidean(&p.0).map_err(fail)?))
    })
}

/// Traditional scaling forcing the 0-based `subset` coefficients to one.
///
/// # Safety
/// `subset` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn os_solve_subset(
    p: *const OsProblem,
    subset: *const usize,
    len: usize,
    out: *mut *mut OsSolution,
) -> OsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        let s = slice(subset, len, "subset")?;
        write_out(out, OsSolution(solve_subset(&p.0, s).map_err(fail)?))
    })
}

/// Annealed minimum of the chosen cost, default schedule.
///
/// # Safety
/// `p` must be a live problem handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn os_anneal(
    p: *const OsProblem,
    kind: u32,
    max_evaluations: u64,
    seed: u64,
    out: *mut *mut OsSolution,
) -> OsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        let cfg = AnnealConfig {
            max_evaluations,
            seed,
            ..AnnealConfig::default()
        };
        let kind = match kind {
            OS_COST_EUCLID => CostKind::Euclid,
            OS_COST_MAX => CostKind::Max,
            v => return Err(bad("cost kind", v)),
        };
        write_out(out, OsSolution(anneal_minimize(&p.0, kind, &cfg).map_err(fail)?))
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn os_solution_free(s: *mut OsSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copies the factors into `buf`.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn os_solution_theta(s: *const OsSolution, buf: *mut f64, len: usize) -> OsStatus {
    guard(|| copy_into(&s.as_ref().ok_or_else(|| null("solution"))?.0.theta, buf, len))
}

/// Copies the coefficients into `buf`.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn os_solution_lambdas(s: *const OsSolution, buf: *mut f64, len: usize) -> OsStatus {
    guard(|| copy_into(&s.as_ref().ok_or_else(|| null("solution"))?.0.lambdas, buf, len))
}

/// Cost and max/min coefficient ratio.
///
/// # Safety
/// `cost` and `ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_solution_metrics(s: *const OsSolution, cost: *mut f64, ratio: *mut f64) -> OsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        if cost.is_null() || ratio.is_null() {
            return Err(null("metric output"));
        }
        *cost = s.0.cost;
        *ratio = s.0.ratio;
        Ok(())
    })
}

/// Runs the latex population balance on the default window.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_pbe_latex(theta: u32, n: usize, steps: usize, out: *mut *mut OsReport) -> OsStatus {
    guard(|| {
        let which = match theta {
            OS_THETA_EUCL => LatexTheta::Eucl,
            OS_THETA_TEST => LatexTheta::Test,
            v => return Err(bad("theta choice", v)),
        };
        let mut s = latex_scenario(&LatexParams::polymat_2018(), which, n, steps).map_err(fail)?;
        s.config.snapshots = false;
        write_out(out, OsReport(simulate(&s.coeffs, &s.config).map_err(fail)?))
    })
}

/// # Safety
/// `r` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn os_report_free(r: *mut OsReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// `[min m, max m, min w, max w, max ε_m, max ε_w]`; errors are NaN when undefined.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn os_report_summary(r: *const OsReport, buf: *mut f64, len: usize) -> OsStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("report"))?.0;
        let v = [
            r.min_m,
            r.max_m,
            r.min_w,
            r.max_w,
            r.max_eps_m().unwrap_or(f64::NAN),
            r.max_eps_w().unwrap_or(f64::NAN),
        ];
        copy_into(&v, buf, len)
    })
}
