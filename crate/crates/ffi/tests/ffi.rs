use optscale_ffi::*;
use std::ffi::CString;
use std::ptr;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { os_last_error_message(buf.as_mut_ptr().cast(), buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

#[test]
fn preset_least_squares_round_trip() {
    unsafe {
        let name = CString::new("projectile").unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(os_problem_preset(name.as_ptr(), &mut p), OsStatus::Ok);
        let (mut nx, mut nd) = (0, 0);
        assert_eq!(os_problem_size(p, &mut nx, &mut nd), OsStatus::Ok);
        assert_eq!((nx, nd), (2, 3));

        let mut s = ptr::null_mut();
        assert_eq!(os_solve_euclidean(p, &mut s), OsStatus::Ok);
        let mut theta = [0.0; 2];
        assert_eq!(os_solution_theta(s, theta.as_mut_ptr(), 2), OsStatus::Ok);
        assert!((theta[0] - (6.3781e6f64 / 9.8).sqrt()).abs() < 1e-9 * theta[0]);
        let mut small = [0.0; 1];
        assert_eq!(os_solution_lambdas(s, small.as_mut_ptr(), 1), OsStatus::BufferTooSmall);
        assert!(last_error().contains("need 3"));
        let (mut cost, mut ratio) = (0.0, 0.0);
        assert_eq!(os_solution_metrics(s, &mut cost, &mut ratio), OsStatus::Ok);
        assert!((ratio - 316.2).abs() < 0.1);
        os_solution_free(s);

        let mut a = ptr::null_mut();
        assert_eq!(os_anneal(p, OS_COST_MAX, 20_000, 1, &mut a), OsStatus::Ok);
        assert_eq!(os_solution_metrics(a, &mut cost, &mut ratio), OsStatus::Ok);
        assert!(cost <= 1.35);
        os_solution_free(a);
        assert_eq!(os_anneal(p, 9, 10, 1, &mut a), OsStatus::InvalidArgument);

        let subset = [0usize, 1];
        assert_eq!(os_solve_subset(p, subset.as_ptr(), 2, &mut s), OsStatus::Ok);
        os_solution_free(s);
        os_problem_free(p);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let mut p = ptr::null_mut();
        // Two proportional exponent rows over two factors.
        let kappa = [2.0, 3.0];
        let a = [1.0, 1.0, 2.0, 2.0];
        assert_eq!(os_problem_new(2, 2, kappa.as_ptr(), a.as_ptr(), ptr::null(), &mut p), OsStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(os_solve_euclidean(p, &mut s), OsStatus::Degenerate);
        assert!(s.is_null());
        assert!(!last_error().is_empty());
        os_problem_free(p);

        let bad = CString::new("nope").unwrap();
        assert_eq!(os_problem_preset(bad.as_ptr(), &mut p), OsStatus::InvalidArgument);
        assert_eq!(os_problem_preset(ptr::null(), &mut p), OsStatus::NullPointer);
        assert_eq!(os_solve_euclidean(ptr::null(), &mut s), OsStatus::NullPointer);
        os_problem_free(ptr::null_mut());
    }
}

#[test]
fn pbe_report() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(os_pbe_latex(OS_THETA_EUCL, 40, 400, &mut r), OsStatus::Ok);
        let mut v = [0.0; 6];
        assert_eq!(os_report_summary(r, v.as_mut_ptr(), 6), OsStatus::Ok);
        assert!(v[1] > 0.0 && v[4].is_finite());
        os_report_free(r);
        assert_eq!(os_pbe_latex(OS_THETA_EUCL, 2, 10, &mut r), OsStatus::InvalidArgument);
    }
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/optscale.h")).unwrap();
    for f in ["os_problem_preset", "os_solve_euclidean", "os_pbe_latex", "OS_COST_MAX", "typedef struct OsProblem OsProblem"] {
        assert!(h.contains(f), "{f}");
    }
}
