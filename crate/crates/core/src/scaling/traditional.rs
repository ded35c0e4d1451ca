//! Traditional scaling: pick `N_x` coefficients, force them to one, and see
//! what happens to the rest.

use super::{CostKind, ScalingProblem, ScalingSolution};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, PIVOT_EPS};
use std::cmp::Ordering;

/// Largest number of subsets `enumerate_traditional` will visit unless told otherwise.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

fn subset_tag(subset: &[usize]) -> String {
    let idx: Vec<String> = subset.iter().map(|i| (i + 1).to_string()).collect();
    format!("subset:{}", idx.join(","))
}

/// Solves `Σ_j α_cj ρ_j = −log10 κ_c` for the chosen (0-based) coefficients `c`.
///
/// A combination is rejected when elimination meets a pivot `≤ 1e-12` or when
/// the determinant of the chosen exponent rows has magnitude `≤ 1e-12`.
pub fn solve_subset(problem: &ScalingProblem, subset: &[usize]) -> Result<ScalingSolution> {
    let nx = problem.n_factors();
    let nd = problem.n_coefficients();
    if subset.len() != nx {
        return Err(Error::domain(format!(
            "subset has {} indices, the problem has {nx} factors",
            subset.len()
        )));
    }
    for (pos, &c) in subset.iter().enumerate() {
        if c >= nd {
            return Err(Error::domain(format!("coefficient index {c} out of range 0..{nd}")));
        }
        if subset[..pos].contains(&c) {
            return Err(Error::domain(format!("coefficient index {c} repeated in subset")));
        }
    }
    let rows: Vec<Vec<f64>> = subset
        .iter()
        .map(|&c| problem.monomials()[c].exponents.clone())
        .collect();
    let rhs: Vec<f64> = subset
        .iter()
        .map(|&c| -problem.monomials()[c].kappa.log10())
        .collect();
    let solved = linalg::solve(&Matrix::from_rows(&rows), &rhs).map_err(|s| {
        Error::UnsolvableCombination {
            subset: subset.to_vec(),
            determinant: s.determinant,
        }
    })?;
    if solved.determinant.abs() <= PIVOT_EPS {
        return Err(Error::UnsolvableCombination {
            subset: subset.to_vec(),
            determinant: solved.determinant,
        });
    }
    let theta = solved.x.iter().map(|r| 10f64.powf(*r)).collect();
    problem.solution_at(theta, CostKind::Euclid, subset_tag(subset))
}

/// Result of visiting every `N_x`-subset of the coefficients.
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Number of subsets visited, `C(N_d, N_x)`.
    pub candidates: u128,
    /// Solvable subsets (0-based indices) with their solutions, ascending by ratio.
    pub entries: Vec<(Vec<usize>, ScalingSolution)>,
}

impl Enumeration {
    /// Subset achieving the smallest ratio (`θ_m`).
    pub fn best(&self) -> Option<&(Vec<usize>, ScalingSolution)> {
        self.entries.first()
    }

    /// Subset achieving the largest ratio (`θ_M`).
    pub fn worst(&self) -> Option<&(Vec<usize>, ScalingSolution)> {
        self.entries.last()
    }

    /// Share of solvable subsets whose ratio exceeds `threshold`.
    pub fn fraction_above(&self, threshold: f64) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        let n = self.entries.iter().filter(|(_, s)| s.ratio > threshold).count();
        n as f64 / self.entries.len() as f64
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Visits all `C(N_d, N_x)` subsets in lexicographic order and keeps the solvable ones.
pub fn enumerate_traditional(problem: &ScalingProblem, cap: u128) -> Result<Enumeration> {
    let nx = problem.n_factors();
    let nd = problem.n_coefficients();
    if nd <= nx {
        return Err(Error::domain(format!(
            "enumeration needs more coefficients ({nd}) than factors ({nx})"
        )));
    }
    let count = binomial(nd, nx);
    if count > cap {
        return Err(Error::CombinationCap { count, cap });
    }

    let mut entries = Vec::new();
    let mut idx: Vec<usize> = (0..nx).collect();
    loop {
        match solve_subset(problem, &idx) {
            Ok(sol) => entries.push((idx.clone(), sol)),
            Err(Error::UnsolvableCombination { .. }) => {}
            Err(e) => return Err(e),
        }
        // next combination
        let mut i = nx;
        while i > 0 && idx[i - 1] == nd - nx + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..nx {
            idx[j] = idx[j - 1] + 1;
        }
    }

    entries.sort_by(|a, b| {
        a.1.ratio
            .partial_cmp(&b.1.ratio)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(Enumeration {
        candidates: count,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_projectile, ProjectileParams};
    use crate::scaling::Monomial;

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(19, 8), 75_582);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn projectile_subset_a() {
        let pr = ProjectileParams::earth();
        let s = solve_subset(&build_projectile(&pr), &[0, 1]).unwrap();
        assert!((s.theta[0] / (pr.r / pr.g).sqrt() - 1.0).abs() < 1e-12);
        assert!((s.theta[1] / pr.r - 1.0).abs() < 1e-12);
        assert!((s.lambdas[0] - 1.0).abs() < 1e-9);
        assert!((s.lambdas[1] - 1.0).abs() < 1e-9);
        assert_eq!(s.method_tag, "subset:1,2");
    }

    #[test]
    fn projectile_subset_c() {
        let pr = ProjectileParams::earth();
        let s = solve_subset(&build_projectile(&pr), &[0, 2]).unwrap();
        assert!((s.theta[0] / (pr.v0 / pr.g) - 1.0).abs() < 1e-12);
        assert!((s.theta[1] / (pr.v0 * pr.v0 / pr.g) - 1.0).abs() < 1e-12);
        assert!((s.lambdas[1] - 1.0e-5).abs() < 0.05e-5);
    }

    #[test]
    fn dependent_rows_are_unsolvable() {
        let p = ScalingProblem::new(
            vec!["a".into(), "b".into()],
            vec![
                Monomial::new("x", 2.0, vec![1.0, -1.0]),
                Monomial::new("y", 3.0, vec![-2.0, 2.0]),
                Monomial::new("z", 3.0, vec![0.0, 1.0]),
            ],
        )
        .unwrap();
        assert!(matches!(
            solve_subset(&p, &[0, 1]),
            Err(Error::UnsolvableCombination { .. })
        ));
        let e = enumerate_traditional(&p, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(e.candidates, 3);
        assert_eq!(e.entries.len(), 2);
    }

    #[test]
    fn bad_subsets_are_domain_errors() {
        let p = build_projectile(&ProjectileParams::earth());
        assert!(matches!(solve_subset(&p, &[0]), Err(Error::Domain(_))));
        assert!(matches!(solve_subset(&p, &[1, 1]), Err(Error::Domain(_))));
        assert!(matches!(solve_subset(&p, &[0, 3]), Err(Error::Domain(_))));
    }

    #[test]
    fn cap_refusal_reports_count() {
        let p = build_projectile(&ProjectileParams::earth());
        match enumerate_traditional(&p, 2) {
            Err(Error::CombinationCap { count, cap }) => assert_eq!((count, cap), (3, 2)),
            other => panic!("expected cap refusal, got {other:?}"),
        }
    }

    #[test]
    fn projectile_enumeration_is_sorted() {
        let e = enumerate_traditional(
            &build_projectile(&ProjectileParams::earth()),
            DEFAULT_ENUMERATION_CAP,
        )
        .unwrap();
        assert_eq!(e.entries.len(), 3);
        for w in e.entries.windows(2) {
            assert!(w[0].1.ratio <= w[1].1.ratio);
        }
        // (a) has ratio ~3e2, (c) ~1e5, (b) ~1e5
        assert_eq!(e.best().unwrap().0, vec![0, 1]);
    }
}
