//! Built-in instances covering each map class and each parameter reduction.
//!
//! Every entry lists the facts it is expected to satisfy; [`check_entry`]
//! re-derives them with the oracle and the solver.

use serde::Serialize;
use thiserror::Error;

use crate::contraction::{self, Modulus, PairSource};
use crate::instance::{Instance, ParsedInstance};
use crate::oracle::{self, OracleError};
use crate::solver::{self, StoppingCriteria, TraceStatus};
use crate::space::{
    self, FiniteSpace, Metric, RealMap, RealSpace, SelfMap, Space, SpaceError,
    SpaceSignature, TableMap,
};

/// Grid size for real-interval entries.
pub const DEFAULT_GRID: usize = 1001;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("construction failed verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Follows immediately from the construction.
    Trivial,
    /// Established by enumeration or by running the solver.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fact {
    /// The point with this label (or value) is fixed.
    FixedPoint(String),
    /// Exactly one fixed point (table scan for finite maps, multi-start
    /// Picard otherwise).
    UniqueFixedPoint,
    BanachConstant(f64),
    KannanBelowHalf,
    WeakContractive,
    /// Banach ratios on refining grids increase toward 1.
    BanachApproachesOne,
    /// The map jumps at this point.
    DiscontinuousAt(f64),
    MinimalS { v: usize, s: f64 },
    AxiomsHold { v: usize, s: f64 },
    /// Picard from the first point cycles.
    Cycles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub instance: ParsedInstance,
    pub expected: Vec<(Fact, Provenance)>,
}

impl CatalogEntry {
    pub fn signature(&self) -> &SpaceSignature {
        &self.instance.signature
    }
}

fn declared(v: usize, s: f64) -> SpaceSignature {
    SpaceSignature::declared(v, s, true).expect("catalog parameters are valid")
}

#[allow(clippy::too_many_arguments)]
fn real_entry(
    name: String,
    lo: f64,
    hi: f64,
    metric: Metric,
    map: &str,
    phi: Option<Modulus>,
    signature: SpaceSignature,
    expected: Vec<(Fact, Provenance)>,
) -> CatalogEntry {
    let space = RealSpace::new(lo, hi, metric, DEFAULT_GRID).expect("valid domain");
    let map = RealMap::parse(map).expect("catalog map parses");
    CatalogEntry {
        name,
        instance: ParsedInstance {
            instance: Instance::Real {
                space,
                map: Some(map),
            },
            signature,
            phi,
        },
        expected,
    }
}

/// `S(u) = c u` on `[-1, 1]` with the standard metric.
pub fn make_banach_linear(c: f64) -> Result<CatalogEntry, CatalogError> {
    if !(0.0..1.0).contains(&c) {
        return Err(CatalogError::Parameter(format!("c must lie in [0, 1), got {c}")));
    }
    Ok(real_entry(
        format!("banach-linear-{c}"),
        -1.0,
        1.0,
        Metric::Abs,
        &format!("{c}*x"),
        Some(Modulus::Linear(1.0 - c)),
        declared(1, 1.0),
        vec![
            (Fact::FixedPoint("0".into()), Provenance::Trivial),
            (Fact::BanachConstant(c), Provenance::Trivial),
            (Fact::WeakContractive, Provenance::Derived),
            (Fact::UniqueFixedPoint, Provenance::Derived),
        ],
    ))
}

/// The discontinuous Kannan map `u/4` on `[0, 1/2)`, `u/5` on `[1/2, 1]`.
pub fn make_kannan_classic() -> CatalogEntry {
    real_entry(
        "kannan-classic".into(),
        0.0,
        1.0,
        Metric::Abs,
        "if(x < 0.5, x/4, x/5)",
        None,
        declared(1, 1.0),
        vec![
            (Fact::FixedPoint("0".into()), Provenance::Trivial),
            (Fact::KannanBelowHalf, Provenance::Derived),
            (Fact::DiscontinuousAt(0.5), Provenance::Derived),
            (Fact::UniqueFixedPoint, Provenance::Derived),
        ],
    )
}

/// `S(u) = u / (1 + u)` on `[0, 10]` with `φ(t) = t² / (1 + t)`: weakly
/// contractive but not a Banach contraction.
pub fn make_weak_contractive_classic() -> CatalogEntry {
    real_entry(
        "weak-contractive-classic".into(),
        0.0,
        10.0,
        Metric::Abs,
        "x/(1+x)",
        Some(Modulus::parse("t^2/(1+t)").expect("modulus parses")),
        declared(1, 1.0),
        vec![
            (Fact::FixedPoint("0".into()), Provenance::Trivial),
            (Fact::WeakContractive, Provenance::Derived),
            (Fact::BanachApproachesOne, Provenance::Derived),
            (Fact::UniqueFixedPoint, Provenance::Derived),
        ],
    )
}

/// Finite space whose minimal constant for `v` is exactly `s`.
///
/// All distances are 1 except `d(0, n-1) = s (v + 1)`: the tuple from point 0
/// to point `n-1` through `v` unit steps has ratio exactly `s`, and every
/// other tuple has ratio at most `1 / (v + 1)`. The map `S(i) = floor(i / 2)`
/// has the unique fixed point 0. The construction is oracle-verified.
pub fn make_bv_finite(v: usize, s: f64, n: usize) -> Result<CatalogEntry, CatalogError> {
    if v == 0 {
        return Err(CatalogError::Parameter("v must be at least 1".into()));
    }
    if !(s.is_finite() && s >= 1.0) {
        return Err(CatalogError::Parameter(format!("s must be a finite real >= 1, got {s}")));
    }
    if n < v + 2 {
        return Err(CatalogError::Parameter(format!(
            "n = {n} points cannot host a tuple with v = {v} intermediates (need n >= v + 2)"
        )));
    }
    let far = s * (v + 1) as f64;
    let labels = (0..n).map(|i| i.to_string()).collect();
    let space = FiniteSpace::from_fn(labels, |i, j| if i == 0 && j == n - 1 { far } else { 1.0 })?;

    let report = oracle::exhaustive_axiom_check(&space, v, s)?;
    let exact = report.worst_ratio.value().is_some_and(|r| crate::leq_rel(s, r) && crate::leq_rel(r, s));
    if !report.passed() || !exact {
        return Err(CatalogError::Verification(format!(
            "planted ratio {} does not match s = {s}",
            report.worst_ratio
        )));
    }
    let map = TableMap::new((0..n).map(|i| i / 2).collect(), n)?;
    let mut signature = declared(v, s);
    signature.axiom_status = report.status();
    Ok(CatalogEntry {
        name: format!("bv-finite-v{v}-s{s}-n{n}"),
        instance: ParsedInstance {
            instance: Instance::Finite {
                space,
                map: Some(map),
            },
            signature,
            phi: None,
        },
        expected: vec![
            (Fact::AxiomsHold { v, s }, Provenance::Derived),
            (Fact::MinimalS { v, s }, Provenance::Derived),
            (Fact::FixedPoint("0".into()), Provenance::Trivial),
            (Fact::UniqueFixedPoint, Provenance::Derived),
        ],
    })
}

/// Finite restriction of the classic Kannan map: orbits of a few seeds,
/// closed up by sending each orbit's last point to 0.
pub fn make_kannan_finite() -> CatalogEntry {
    let classic = |x: f64| if x < 0.5 { x / 4.0 } else { x / 5.0 };
    let mut xs = vec![0.0];
    for seed in [1.0, 0.9, 0.75, 0.6, 0.3] {
        let mut x: f64 = seed;
        for _ in 0..6 {
            xs.push(x);
            x = classic(x);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let targets = xs
        .iter()
        .map(|&x| {
            let y = classic(x);
            xs.iter().position(|&p| p == y).unwrap_or(0)
        })
        .collect();
    let space = FiniteSpace::on_line(&xs, |x, y| (x - y).abs()).expect("distinct points");
    let map = TableMap::new(targets, xs.len()).expect("targets in range");
    CatalogEntry {
        name: "kannan-finite".into(),
        instance: ParsedInstance {
            instance: Instance::Finite {
                space,
                map: Some(map),
            },
            signature: declared(1, 1.0),
            phi: None,
        },
        expected: vec![
            (Fact::AxiomsHold { v: 1, s: 1.0 }, Provenance::Derived),
            (Fact::FixedPoint("0".into()), Provenance::Trivial),
            (Fact::KannanBelowHalf, Provenance::Derived),
            (Fact::UniqueFixedPoint, Provenance::Derived),
        ],
    }
}

/// Two points swapped by the map.
pub fn make_swap() -> CatalogEntry {
    let space = FiniteSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 1.0).expect("valid");
    CatalogEntry {
        name: "swap".into(),
        instance: ParsedInstance {
            instance: Instance::Finite {
                space,
                map: Some(TableMap::new(vec![1, 0], 2).expect("valid")),
            },
            signature: declared(1, 1.0),
            phi: None,
        },
        expected: vec![(Fact::Cycles, Provenance::Trivial)],
    }
}

/// All fixed entries plus a few parameterized ones.
pub fn all_entries() -> Vec<CatalogEntry> {
    let mut out = vec![
        make_banach_linear(0.5).expect("valid"),
        make_kannan_classic(),
        make_weak_contractive_classic(),
        make_kannan_finite(),
        make_swap(),
    ];
    for (v, s, n) in [(1, 2.0, 3), (2, 1.0, 5), (1, 1.0, 4), (1, 3.0, 10)] {
        out.push(make_bv_finite(v, s, n).expect("valid parameters"));
    }
    out
}

pub fn entry_by_name(name: &str) -> Option<CatalogEntry> {
    all_entries().into_iter().find(|e| e.name == name)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactCheck {
    pub fact: Fact,
    pub provenance: Provenance,
    pub ok: bool,
    pub detail: String,
}

/// Seeded starts spread over the domain for uniqueness checks.
pub fn seeded_starts(space: &RealSpace, count: usize, seed: u64) -> Vec<f64> {
    space.sample(count, seed)
}

fn real_fact(space: &RealSpace, map: &RealMap, phi: Option<&Modulus>, fact: &Fact) -> Result<(bool, String), CatalogError> {
    let grid = space.grid();
    let eval = |x: f64| map.apply(x).map_err(|e| CatalogError::Verification(e.to_string()));
    Ok(match fact {
        Fact::FixedPoint(label) => {
            let x: f64 = label.parse().map_err(|_| CatalogError::Verification(format!("bad point '{label}'")))?;
            let y = eval(x)?;
            (y == x, format!("S({x}) = {y}"))
        }
        Fact::UniqueFixedPoint => {
            let starts = seeded_starts(space, 10, 0);
            let stop = StoppingCriteria::new(1e-10, 200_000);
            let verdict = solver::check_uniqueness(space, map, &starts, stop, solver::DEFAULT_TOL_UNIQUE)
                .map_err(|e| CatalogError::Verification(e.to_string()))?;
            (verdict.passed(), format!("{verdict:?}").chars().take(120).collect())
        }
        Fact::BanachConstant(c) => {
            let (exact_c, _) = oracle::exact_constants(space, map, &grid)?;
            let ok = exact_c.value().is_some_and(|v| (v - c).abs() <= 1e-9 * c.max(1.0));
            (ok, format!("exact c on grid = {exact_c}"))
        }
        Fact::KannanBelowHalf => {
            let (_, gamma) = oracle::exact_constants(space, map, &grid)?;
            (gamma.below(0.5), format!("exact γ on grid = {gamma}"))
        }
        Fact::WeakContractive => {
            let phi = phi.ok_or_else(|| CatalogError::Verification("no modulus".into()))?;
            let weak = contraction::check_weak_contractive(space, map, phi, &PairSource::Exhaustive(grid))
                .map_err(|e| CatalogError::Verification(e.to_string()))?;
            (weak.weak_ok, format!("min slack {}", weak.min_slack))
        }
        Fact::BanachApproachesOne => {
            let mut cs = Vec::new();
            for n in [11, 101, 1001] {
                let g = space::uniform_grid(space.lo, space.hi, n);
                cs.push(oracle::exact_constants(space, map, &g)?.0);
            }
            let vals: Vec<f64> = cs.iter().filter_map(|c| c.value()).collect();
            let ok = vals.len() == 3
                && vals.windows(2).all(|w| w[0] < w[1])
                && vals.iter().all(|&c| c < 1.0)
                && vals[2] > 0.99;
            (ok, format!("c on refining grids = {vals:?}"))
        }
        Fact::DiscontinuousAt(x) => {
            let h = 1e-9;
            let jump = (eval(x - h)? - eval(*x)?).abs();
            (jump > 1e3 * h, format!("|S({x}-h) - S({x})| = {jump}"))
        }
        Fact::MinimalS { .. } | Fact::AxiomsHold { .. } | Fact::Cycles => {
            (false, "not applicable to function-backed entries".into())
        }
    })
}

fn finite_fact(space: &FiniteSpace, map: &TableMap, fact: &Fact) -> Result<(bool, String), CatalogError> {
    Ok(match fact {
        Fact::FixedPoint(label) => {
            let idx = space
                .index_of(label)
                .ok_or_else(|| CatalogError::Verification(format!("no point '{label}'")))?;
            (oracle::brute_fixed_points(map).contains(&idx), format!("S({label}) = {}", space.label(map.targets()[idx])))
        }
        Fact::UniqueFixedPoint => {
            let fixed = oracle::brute_fixed_points(map);
            (fixed.len() == 1, format!("fixed points {fixed:?}"))
        }
        Fact::BanachConstant(c) => {
            let (exact_c, _) = oracle::exact_constants(space, map, &space.points())?;
            (exact_c.value().is_some_and(|v| (v - c).abs() <= 1e-9 * c.max(1.0)), format!("exact c = {exact_c}"))
        }
        Fact::KannanBelowHalf => {
            let (_, gamma) = oracle::exact_constants(space, map, &space.points())?;
            (gamma.below(0.5), format!("exact γ = {gamma}"))
        }
        Fact::MinimalS { v, s } => {
            let ms = space::minimal_s(space, *v, crate::DEFAULT_BUDGET, 0)?;
            let ok = ms.label == space::MinimalSLabel::Exact && ms.s_min.at_most(*s) && !ms.s_min.below(*s * (1.0 - 1e-9));
            (ok, format!("s_min = {}", ms.s_min))
        }
        Fact::AxiomsHold { v, s } => {
            let r = oracle::exhaustive_axiom_check(space, *v, *s)?;
            (r.passed(), format!("worst ratio {}", r.worst_ratio))
        }
        Fact::Cycles => {
            let trace = solver::picard(space, map, 0, StoppingCriteria::default())
                .map_err(|e| CatalogError::Verification(e.to_string()))?;
            (matches!(trace.status, TraceStatus::CycleDetected { .. }), trace.status.name().to_string())
        }
        Fact::WeakContractive | Fact::BanachApproachesOne | Fact::DiscontinuousAt(_) => {
            (false, "not applicable to finite entries".into())
        }
    })
}

/// Re-derive every expected fact of `entry`.
pub fn check_entry(entry: &CatalogEntry) -> Result<Vec<FactCheck>, CatalogError> {
    entry
        .expected
        .iter()
        .map(|(fact, provenance)| {
            let (ok, detail) = match &entry.instance.instance {
                Instance::Real {
                    space,
                    map: Some(map),
                } => real_fact(space, map, entry.instance.phi.as_ref(), fact)?,
                Instance::Finite {
                    space,
                    map: Some(map),
                } => finite_fact(space, map, fact)?,
                _ => (false, "entry has no map".into()),
            };
            Ok(FactCheck {
                fact: fact.clone(),
                provenance: *provenance,
                ok,
                detail,
            })
        })
        .collect()
}

/// Parameter reductions of the two fixed-point theorems.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCase {
    pub name: &'static str,
    pub entry: CatalogEntry,
    pub kind: ReductionKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReductionKind {
    /// `φ(t) = (1 - c) t`: the weak check must agree with `c_hat <= c`.
    LinearModulus { c: f64 },
    /// Kannan map under the entry's `(v, s)`.
    Kannan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionOutcome {
    pub name: &'static str,
    /// Linear-modulus cases: weak verdict equals the Banach verdict.
    pub equivalence_ok: bool,
    pub hypotheses_ok: bool,
    pub converged: bool,
}

impl ReductionOutcome {
    pub fn passed(&self) -> bool {
        self.equivalence_ok && self.hypotheses_ok && self.converged
    }
}

pub fn remark_reductions() -> Vec<ReductionCase> {
    let mut squared = make_banach_linear(0.5).expect("valid");
    squared.name = "banach-linear-0.5-squared-metric".into();
    if let Instance::Real { space, .. } = &mut squared.instance.instance {
        space.metric = Metric::parse("(x - y)^2").expect("metric parses");
    }
    // |x - y|^2 is a b-metric with s = 2; S(u) = u/2 contracts it by 1/4
    squared.instance.signature = declared(1, 2.0);
    squared.instance.phi = Some(Modulus::Linear(0.75));

    let mut kannan_v2 = make_kannan_classic();
    kannan_v2.instance.signature = declared(2, 1.0);

    vec![
        ReductionCase {
            name: "v=s=1, φ(t)=ct: Banach",
            entry: make_banach_linear(0.5).expect("valid"),
            kind: ReductionKind::LinearModulus { c: 0.5 },
        },
        ReductionCase {
            name: "φ(t)=ct, v=1, s=2: Banach in a b-metric space",
            entry: squared,
            kind: ReductionKind::LinearModulus { c: 0.25 },
        },
        ReductionCase {
            name: "v=s=1: classical Kannan",
            entry: make_kannan_classic(),
            kind: ReductionKind::Kannan,
        },
        ReductionCase {
            name: "v=2, s=1: Kannan in a rectangular space",
            entry: kannan_v2,
            kind: ReductionKind::Kannan,
        },
    ]
}

/// Run a reduction case end to end.
pub fn run_reduction(case: &ReductionCase) -> Result<ReductionOutcome, CatalogError> {
    let Instance::Real {
        space,
        map: Some(map),
    } = &case.entry.instance.instance
    else {
        return Err(CatalogError::Parameter("reductions run on function-backed entries".into()));
    };
    let sig = &case.entry.instance.signature;
    let pairs = PairSource::Exhaustive(space.grid());
    let verr = |e: &dyn std::fmt::Display| CatalogError::Verification(e.to_string());
    let trace = solver::picard(space, map, space.hi, StoppingCriteria::default()).map_err(|e| verr(&e))?;
    let converged = trace.converged_point().is_some();

    let (equivalence_ok, hypotheses_ok) = match case.kind {
        ReductionKind::LinearModulus { c } => {
            let phi = Modulus::Linear(1.0 - c);
            let report = contraction::analyze_map(space, map, &pairs, Some(&phi)).map_err(|e| verr(&e))?;
            let weak_ok = report.weak.as_ref().is_some_and(|w| w.weak_ok);
            let banach_ok = report.banach_c.at_most(c);
            let grid = contraction::default_modulus_grid(space.diameter_estimate());
            let phi_report = contraction::validate_modulus(&phi, &grid).map_err(|e| verr(&e))?;
            let h = contraction::check_hypotheses(sig, &report, Some(&phi_report), contraction::Theorem::WeakContraction);
            (weak_ok == banach_ok && weak_ok, h.satisfied)
        }
        ReductionKind::Kannan => {
            let report = contraction::analyze_map(space, map, &pairs, None).map_err(|e| verr(&e))?;
            let h = contraction::check_hypotheses(sig, &report, None, contraction::Theorem::Kannan);
            let gamma = report.kannan_gamma.value().unwrap_or(f64::INFINITY);
            let bounds_ok = gamma < 0.5
                && solver::verify_kannan_bounds(space, &trace, gamma, &[1, 2, 3], crate::EPS_CHECK)
                    .map_err(|e| verr(&e))?
                    .all_ok;
            let residual_ok = match trace.converged_point() {
                Some(u) => {
                    solver::verify_residual(space, map, sig, &trace, u, solver::ResidualForm::Kannan(gamma), solver::DEFAULT_TOL_FIXED)
                        .map_err(|e| verr(&e))?
                        .ok
                }
                None => false,
            };
            (bounds_ok && residual_ok, h.satisfied)
        }
    };
    Ok(ReductionOutcome {
        name: case.name,
        equivalence_ok,
        hypotheses_ok,
        converged,
    })
}
