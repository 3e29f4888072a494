//! Brute-force ground truth for finite instances.
//!
//! Everything here is deliberately naive: plain nested loops over all ordered
//! tuples and pairs, sequential, with no symmetry shortcuts. The fast paths in
//! [`crate::space`] and [`crate::contraction`] are tested against it.

use serde::Serialize;
use thiserror::Error;

use crate::space::{AxiomReport, CheckMode, FiniteSpace, MapError, SelfMap, Space, TableMap};
use crate::{Bound, EPS_EQ};

/// Largest tuple count the oracle will enumerate.
pub const ORACLE_TUPLE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{tuples} tuples exceeds the oracle limit of {limit}; shrink the instance")]
    BudgetExceeded { tuples: u128, limit: u64 },
    #[error("v must be >= 1 and s a finite real >= 1")]
    InvalidParameters,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// `{p : S(p) = p}` by exact table lookup.
pub fn brute_fixed_points(map: &TableMap) -> Vec<usize> {
    map.targets()
        .iter()
        .enumerate()
        .filter(|(i, &t)| *i == t)
        .map(|(i, _)| i)
        .collect()
}

fn ordered_tuple_count(n: usize, v: usize) -> u128 {
    if n < v + 2 {
        return 0;
    }
    (0..v + 2).map(|i| (n - i) as u128).product()
}

/// Enumerate every ordered tuple `(u, w, z_1..z_v)` and evaluate the
/// polygon inequality with constant `s`.
pub fn exhaustive_axiom_check(space: &FiniteSpace, v: usize, s: f64) -> Result<AxiomReport, OracleError> {
    if v == 0 || !(s.is_finite() && s >= 1.0) {
        return Err(OracleError::InvalidParameters);
    }
    let n = space.len();
    let tuples = ordered_tuple_count(n, v);
    if tuples > ORACLE_TUPLE_LIMIT as u128 {
        return Err(OracleError::BudgetExceeded {
            tuples,
            limit: ORACLE_TUPLE_LIMIT,
        });
    }

    let mut condition1_ok = true;
    let mut condition2_ok = true;
    for i in 0..n {
        for j in 0..n {
            let d = space.d(i, j);
            if (i == j) != (d.abs() <= EPS_EQ) {
                condition1_ok = false;
            }
            if d != space.d(j, i) {
                condition2_ok = false;
            }
        }
    }

    struct State {
        best: Option<(f64, Vec<usize>, f64, f64)>,
        checked: u64,
        skipped: u64,
    }
    let mut state = State {
        best: None,
        checked: 0,
        skipped: 0,
    };

    fn visit(space: &FiniteSpace, tuple: &mut Vec<usize>, v: usize, state: &mut State) {
        let n = space.len();
        if tuple.len() == v + 2 {
            let (u, w) = (tuple[0], tuple[1]);
            let mut path = 0.0;
            let mut prev = u;
            for &z in &tuple[2..] {
                path += space.d(prev, z);
                prev = z;
            }
            path += space.d(prev, w);
            let lhs = space.d(u, w);
            state.checked += 1;
            let ratio = if path > EPS_EQ {
                lhs / path
            } else if lhs > EPS_EQ {
                f64::INFINITY
            } else {
                state.skipped += 1;
                return;
            };
            if state.best.as_ref().is_none_or(|b| ratio > b.0) {
                state.best = Some((ratio, tuple.clone(), lhs, path));
            }
            return;
        }
        for p in 0..n {
            if tuple.contains(&p) {
                continue;
            }
            tuple.push(p);
            visit(space, tuple, v, state);
            tuple.pop();
        }
    }

    let mut tuple = Vec::with_capacity(v + 2);
    visit(space, &mut tuple, v, &mut state);

    let (worst_ratio, witness) = match state.best {
        Some((ratio, tuple, lhs, path_sum)) => (
            if ratio.is_infinite() { Bound::Unbounded } else { Bound::Finite(ratio) },
            Some(crate::space::Witness { tuple, lhs, path_sum }),
        ),
        None => (Bound::Finite(0.0), None),
    };
    let condition3_ok = match worst_ratio {
        Bound::Finite(r) => crate::leq_rel(r, s),
        Bound::Unbounded => false,
    };
    Ok(AxiomReport {
        v,
        s,
        points: n,
        condition1_ok,
        condition2_ok,
        condition3_ok,
        worst_ratio,
        witness,
        tuples_checked: state.checked,
        zero_tuples_skipped: state.skipped,
        admissible_tuples: tuples as u64,
        mode: CheckMode::Exhaustive,
        vacuous: tuples == 0,
    })
}

/// Exact Banach and Kannan constants over all ordered pairs `u != w` of
/// `points`. Distances are taken in `space`, so images need not lie in
/// `points`.
pub fn exact_constants<S, M>(space: &S, map: &M, points: &[S::Point]) -> Result<(Bound, Bound), OracleError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let mut c: f64 = 0.0;
    let mut gamma: f64 = 0.0;
    for (i, &u) in points.iter().enumerate() {
        let su = map.apply(u)?;
        for (j, &w) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let sw = map.apply(w)?;
            let num = space.distance(su, sw);
            let d = space.distance(u, w);
            if d > EPS_EQ {
                c = c.max(num / d);
            } else if num > EPS_EQ {
                c = f64::INFINITY;
            }
            let den = space.distance(u, su) + space.distance(w, sw);
            if den > EPS_EQ {
                gamma = gamma.max(num / den);
            } else if num > EPS_EQ {
                gamma = f64::INFINITY;
            }
        }
    }
    let tag = |x: f64| if x.is_infinite() { Bound::Unbounded } else { Bound::Finite(x) };
    Ok((tag(c), tag(gamma)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub fixed_points: Vec<usize>,
    pub exact_c: Bound,
    pub exact_gamma: Bound,
    pub axiom_verdict: AxiomReport,
}

/// All oracle facts for a finite table-backed instance.
pub fn run_oracle(space: &FiniteSpace, map: &TableMap, v: usize, s: f64) -> Result<OracleResult, OracleError> {
    let (exact_c, exact_gamma) = exact_constants(space, map, &space.points())?;
    Ok(OracleResult {
        fixed_points: brute_fixed_points(map),
        exact_c,
        exact_gamma,
        axiom_verdict: exhaustive_axiom_check(space, v, s)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64], f: impl Fn(f64, f64) -> f64) -> FiniteSpace {
        FiniteSpace::on_line(xs, f).unwrap()
    }

    #[test]
    fn fixed_points_by_lookup() {
        assert_eq!(brute_fixed_points(&TableMap::identity(4)), vec![0, 1, 2, 3]);
        let derangement = TableMap::new(vec![1, 2, 3, 0], 4).unwrap();
        assert!(brute_fixed_points(&derangement).is_empty());
    }

    #[test]
    fn axiom_examples() {
        let metric = line(&[0.0, 1.0, 3.0, 7.0], |x, y| (x - y).abs());
        let r = exhaustive_axiom_check(&metric, 1, 1.0).unwrap();
        assert!(r.passed());
        assert_eq!(r.tuples_checked, 24);

        let sq = line(&[0.0, 1.0, 2.0, 3.0], |x, y| (x - y).powi(2));
        let r = exhaustive_axiom_check(&sq, 1, 1.0).unwrap();
        assert!(!r.condition3_ok);
        assert!(r.witness.is_some());

        let r = exhaustive_axiom_check(&line(&[0.0, 1.0, 2.0], |x, y| (x - y).abs()), 2, 1.0).unwrap();
        assert!(r.vacuous && r.passed());
    }

    #[test]
    fn refuses_large_instances() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let big = line(&xs, |x, y| (x - y).abs());
        assert!(matches!(
            exhaustive_axiom_check(&big, 3, 1.0),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn constants_examples() {
        let space = line(&[0.0, 1.0, 2.0], |x, y| (x - y).abs());
        let constant = TableMap::new(vec![1, 1, 1], 3).unwrap();
        assert_eq!(
            exact_constants(&space, &constant, &space.points()).unwrap(),
            (Bound::Finite(0.0), Bound::Finite(0.0))
        );
        let id = TableMap::identity(3);
        assert_eq!(
            exact_constants(&space, &id, &space.points()).unwrap(),
            (Bound::Finite(1.0), Bound::Unbounded)
        );
    }
}
