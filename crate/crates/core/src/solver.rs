//! Picard iteration `u_{n+1} = S u_n` and checks of the quantitative bounds
//! that hold along the orbit of Kannan-type and weakly contractive maps.
//!
//! Convergence is declared from the step distance `d(u_n, u_{n+1})` and
//! confirmed by the residual `d(u*, S u*)`. Coordinates are never compared:
//! the distance of a b_v(s) space need not be continuous.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::contraction::{ContractionError, Modulus};
use crate::par::{self, Execution};
use crate::space::{MapError, SelfMap, Space, SpaceSignature};
use crate::EPS_CHECK;

pub const DEFAULT_TOL_STEP: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_CYCLE_WINDOW: usize = 64;
pub const DEFAULT_TOL_UNIQUE: f64 = 1e-6;
pub const DEFAULT_TOL_FIXED: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("iterate {index} left the domain: S({from}) = {to}")]
    DomainEscape { index: usize, from: String, to: String },
    #[error("map evaluation failed at iterate {index}: {source}")]
    Map { index: usize, source: MapError },
    #[error("invalid stopping criteria: {0}")]
    InvalidCriteria(String),
    #[error("Kannan constant must lie in [0, 1/2), got {0}")]
    GammaOutOfRange(f64),
    #[error("trace has {have} points, need at least {need}")]
    InsufficientTail { have: usize, need: usize },
    #[error("start point {0} is outside the domain")]
    StartOutsideDomain(String),
    #[error("uniqueness check needs at least 2 starts")]
    TooFewStarts,
    #[error(transparent)]
    Modulus(#[from] ContractionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoppingCriteria {
    /// Stop once `d(u_n, u_{n+1}) < tol_step`.
    pub tol_step: f64,
    pub max_iter: usize,
    /// How many earlier iterates are compared against each new one.
    pub cycle_window: usize,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        StoppingCriteria {
            tol_step: DEFAULT_TOL_STEP,
            max_iter: DEFAULT_MAX_ITER,
            cycle_window: DEFAULT_CYCLE_WINDOW,
        }
    }
}

impl StoppingCriteria {
    pub fn new(tol_step: f64, max_iter: usize) -> Self {
        StoppingCriteria {
            tol_step,
            max_iter,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol_step > 0.0) {
            return Err(SolverError::InvalidCriteria(format!("tol_step must be > 0, got {}", self.tol_step)));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidCriteria("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus<P> {
    Converged { point: P, residual: f64 },
    MaxIter,
    /// `u_second` coincides with the earlier, non-fixed `u_first`.
    CycleDetected { first: usize, second: usize },
}

impl<P> TraceStatus<P> {
    pub fn name(&self) -> &'static str {
        match self {
            TraceStatus::Converged { .. } => "Converged",
            TraceStatus::MaxIter => "MaxIter",
            TraceStatus::CycleDetected { .. } => "CycleDetected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace<P> {
    pub iterates: Vec<P>,
    /// `step_dist[n] = d(u_n, u_{n+1})`.
    pub step_dist: Vec<f64>,
    pub status: TraceStatus<P>,
    pub stop: StoppingCriteria,
}

impl<P: Copy> IterationTrace<P> {
    /// `α_n = d(u_n, u_{n+p})` for every `n` with `n + p` in the trace.
    pub fn gap<S: Space<Point = P>>(&self, space: &S, p: usize) -> Vec<f64> {
        if p == 0 || self.iterates.len() <= p {
            return Vec::new();
        }
        (0..self.iterates.len() - p)
            .map(|n| space.distance(self.iterates[n], self.iterates[n + p]))
            .collect()
    }

    pub fn converged_point(&self) -> Option<P> {
        match self.status {
            TraceStatus::Converged { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn last(&self) -> P {
        *self.iterates.last().expect("trace holds u_0")
    }
}

fn step<S, M>(space: &S, map: &M, index: usize, u: S::Point) -> Result<S::Point, SolverError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let next = map.apply(u).map_err(|source| SolverError::Map { index, source })?;
    if !space.contains(next) {
        return Err(SolverError::DomainEscape {
            index: index + 1,
            from: space.label(u),
            to: format!("{next:?}"),
        });
    }
    Ok(next)
}

/// Iterate `S` from `u0` until the step distance drops below `tol_step`, an
/// earlier iterate recurs, or `max_iter` steps have been taken.
pub fn picard<S, M>(
    space: &S,
    map: &M,
    u0: S::Point,
    stop: StoppingCriteria,
) -> Result<IterationTrace<S::Point>, SolverError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    stop.validate()?;
    if !space.contains(u0) {
        return Err(SolverError::StartOutsideDomain(format!("{u0:?}")));
    }
    let mut iterates = vec![u0];
    let mut step_dist = Vec::new();
    let mut status = TraceStatus::MaxIter;
    for n in 0..stop.max_iter {
        let u = iterates[n];
        let next = step(space, map, n, u)?;
        let d = space.distance(u, next);
        iterates.push(next);
        step_dist.push(d);
        if d < stop.tol_step || space.coincide(u, next) {
            let image = step(space, map, n + 1, next)?;
            status = TraceStatus::Converged {
                point: next,
                residual: space.distance(next, image),
            };
            break;
        }
        let lo = (n + 1).saturating_sub(stop.cycle_window);
        if let Some(m) = (lo..n).find(|&m| space.coincide(iterates[m], next)) {
            status = TraceStatus::CycleDetected {
                first: m,
                second: n + 1,
            };
            break;
        }
    }
    Ok(IterationTrace {
        iterates,
        step_dist,
        status,
        stop,
    })
}

fn check_gamma(gamma: f64) -> Result<f64, SolverError> {
    if (0.0..0.5).contains(&gamma) {
        Ok(gamma / (1.0 - gamma))
    } else {
        Err(SolverError::GammaOutOfRange(gamma))
    }
}

/// `(γ / (1 - γ))^n d0`: a priori bound on `d(u_n, u_{n+1})` for a Kannan map.
pub fn kannan_rate_bound(gamma: f64, d0: f64, n: usize) -> Result<f64, SolverError> {
    let q = check_gamma(gamma)?;
    Ok(q.powi(n as i32) * d0)
}

/// `γ [q^{n-1} + q^{n+p-1}] d0` with `q = γ / (1 - γ)`: bound on
/// `d(u_n, u_{n+p})`, for `n >= 1`, `p >= 1`.
pub fn kannan_gap_bound(gamma: f64, d0: f64, n: usize, p: usize) -> Result<f64, SolverError> {
    let q = check_gamma(gamma)?;
    if n == 0 || p == 0 {
        return Err(SolverError::InvalidCriteria("gap bound needs n >= 1 and p >= 1".into()));
    }
    Ok(gamma * (q.powi(n as i32 - 1) + q.powi((n + p) as i32 - 1)) * d0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepVerdict {
    pub n: usize,
    pub observed: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapVerdict {
    pub n: usize,
    pub p: usize,
    pub observed: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KannanBoundsReport {
    pub gamma: f64,
    pub steps: Vec<StepVerdict>,
    pub gaps: Vec<GapVerdict>,
    pub all_ok: bool,
}

impl KannanBoundsReport {
    pub fn first_violation(&self) -> Option<usize> {
        self.steps.iter().find(|v| !v.ok).map(|v| v.n)
    }
}

/// Compare every step distance with [`kannan_rate_bound`] and every gap
/// `d(u_n, u_{n+p})` with [`kannan_gap_bound`], allowing `slack_tol`.
pub fn verify_kannan_bounds<S: Space>(
    space: &S,
    trace: &IterationTrace<S::Point>,
    gamma: f64,
    p_window: &[usize],
    slack_tol: f64,
) -> Result<KannanBoundsReport, SolverError> {
    check_gamma(gamma)?;
    let d0 = trace.step_dist.first().copied().unwrap_or(0.0);
    let mut steps = Vec::with_capacity(trace.step_dist.len());
    for (n, &observed) in trace.step_dist.iter().enumerate() {
        let bound = kannan_rate_bound(gamma, d0, n)?;
        steps.push(StepVerdict {
            n,
            observed,
            bound,
            ok: observed <= bound + slack_tol,
        });
    }
    let mut gaps = Vec::new();
    for &p in p_window.iter().filter(|&&p| p >= 1) {
        for (n, &observed) in trace.gap(space, p).iter().enumerate().skip(1) {
            let bound = kannan_gap_bound(gamma, d0, n, p)?;
            gaps.push(GapVerdict {
                n,
                p,
                observed,
                bound,
                ok: observed <= bound + slack_tol,
            });
        }
    }
    let all_ok = steps.iter().all(|v| v.ok) && gaps.iter().all(|v| v.ok);
    Ok(KannanBoundsReport {
        gamma,
        steps,
        gaps,
        all_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecreaseVerdict {
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub alpha_next: f64,
    /// `α_n - φ(α_n) - α_{n+1}`
    pub slack: f64,
    pub ok: bool,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakDecreaseReport {
    pub p_window: Vec<usize>,
    pub verdicts: Vec<DecreaseVerdict>,
    pub min_slack: Option<f64>,
    /// Final `α` per `p` is below `tail_tol`.
    pub tail_below: Vec<(usize, bool)>,
    pub all_ok: bool,
}

/// Check `α_{n+1} <= α_n - φ(α_n)` and monotonicity of `α_n = d(u_n, u_{n+p})`
/// for every `p` in `p_window`.
pub fn verify_weak_decrease<S: Space>(
    space: &S,
    trace: &IterationTrace<S::Point>,
    phi: &Modulus,
    p_window: &[usize],
    slack_tol: f64,
    tail_tol: f64,
) -> Result<WeakDecreaseReport, SolverError> {
    let mut verdicts = Vec::new();
    let mut tail_below = Vec::new();
    for &p in p_window {
        let alpha = trace.gap(space, p);
        verdicts.extend(decrease_verdicts(&alpha, p, phi, slack_tol)?);
        tail_below.push((p, alpha.last().is_none_or(|&a| a < tail_tol)));
    }
    let min_slack = verdicts.iter().map(|v| v.slack).reduce(f64::min);
    let all_ok = verdicts.iter().all(|v| v.ok && v.monotone) && tail_below.iter().all(|t| t.1);
    Ok(WeakDecreaseReport {
        p_window: p_window.to_vec(),
        verdicts,
        min_slack,
        tail_below,
        all_ok,
    })
}

/// Decrease verdicts for an explicit `α` sequence.
pub fn decrease_verdicts(
    alpha: &[f64],
    p: usize,
    phi: &Modulus,
    slack_tol: f64,
) -> Result<Vec<DecreaseVerdict>, SolverError> {
    alpha
        .windows(2)
        .enumerate()
        .map(|(n, w)| {
            let slack = w[0] - phi.eval(w[0])? - w[1];
            Ok(DecreaseVerdict {
                n,
                p,
                alpha: w[0],
                alpha_next: w[1],
                slack,
                ok: slack >= -slack_tol,
                monotone: w[1] <= w[0] + slack_tol,
            })
        })
        .collect()
}

/// Contraction type used to bound the residual.
#[derive(Debug, Clone, Copy)]
pub enum ResidualForm<'a> {
    Kannan(f64),
    Weak(&'a Modulus),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `d(u*, S u*)`
    pub residual: f64,
    /// Upper bound on the residual from the trace tail; `None` if degenerate.
    pub bound: Option<f64>,
    /// `s γ >= 1`: the Kannan form cannot be divided through.
    pub degenerate: bool,
    pub bound_ok: bool,
    pub fixed_ok: bool,
    pub ok: bool,
}

/// Bound `d(u*, S u*)` through the polygon inequality along the last `v + 1`
/// iterates `u_n..u_{n+v}` and check it against `tol_fixed`.
///
/// Weak form: `s [d(u*, u_{n+1}) + Σ d(u_{n+i}, u_{n+i+1}) + d(u_{n+v-1}, u*) - φ(d(u_{n+v-1}, u*))]`.
/// Kannan form: `s [d(u*, u_{n+1}) + Σ d(u_{n+i}, u_{n+i+1}) + γ d(u_{n+v-1}, u_{n+v})] / (1 - s γ)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_residual<S, M>(
    space: &S,
    map: &M,
    signature: &SpaceSignature,
    trace: &IterationTrace<S::Point>,
    candidate: S::Point,
    form: ResidualForm<'_>,
    tol_fixed: f64,
) -> Result<ResidualReport, SolverError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let v = signature.v;
    let s = signature.s;
    let len = trace.iterates.len();
    if len < v + 1 {
        return Err(SolverError::InsufficientTail { have: len, need: v + 1 });
    }
    let image = map
        .apply(candidate)
        .map_err(|source| SolverError::Map { index: len, source })?;
    let residual = space.distance(candidate, image);

    let n = len - 1 - v;
    let u = &trace.iterates;
    let mut chain = space.distance(candidate, u[n + 1]);
    for i in 1..v {
        chain += space.distance(u[n + i], u[n + i + 1]);
    }
    let (bound, degenerate) = match form {
        ResidualForm::Weak(phi) => {
            let tail = space.distance(u[n + v - 1], candidate);
            (Some(s * (chain + tail - phi.eval(tail)?)), false)
        }
        ResidualForm::Kannan(gamma) => {
            let denom = 1.0 - s * gamma;
            if denom <= 0.0 {
                (None, true)
            } else {
                let last = space.distance(u[n + v - 1], u[n + v]);
                (Some(s * (chain + gamma * last) / denom), false)
            }
        }
    };
    let bound_ok = bound.is_none_or(|b| residual <= b + EPS_CHECK * b.abs().max(1.0));
    let fixed_ok = residual <= tol_fixed;
    Ok(ResidualReport {
        residual,
        bound,
        degenerate,
        bound_ok,
        fixed_ok,
        ok: bound_ok && fixed_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict<P> {
    /// All runs converged to limits pairwise within `tol_unique`.
    Pass { limits: Vec<P>, max_spread: f64 },
    /// Two runs converged to distinct fixed points.
    Fail { first: usize, second: usize, distance: f64 },
    /// Some runs did not converge: `(start index, status name)`.
    Inconclusive { failures: Vec<(usize, String)> },
}

impl<P> UniquenessVerdict<P> {
    pub fn passed(&self) -> bool {
        matches!(self, UniquenessVerdict::Pass { .. })
    }
}

/// Run Picard from every start (in parallel) and compare the limits.
pub fn check_uniqueness<S, M>(
    space: &S,
    map: &M,
    starts: &[S::Point],
    stop: StoppingCriteria,
    tol_unique: f64,
) -> Result<UniquenessVerdict<S::Point>, SolverError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    check_uniqueness_with(space, map, starts, stop, tol_unique, Execution::default())
}

pub fn check_uniqueness_with<S, M>(
    space: &S,
    map: &M,
    starts: &[S::Point],
    stop: StoppingCriteria,
    tol_unique: f64,
    exec: Execution,
) -> Result<UniquenessVerdict<S::Point>, SolverError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    if starts.len() < 2 {
        return Err(SolverError::TooFewStarts);
    }
    let runs = par::map_collect(exec, starts, |&u0| picard(space, map, u0, stop));
    let mut limits = Vec::with_capacity(runs.len());
    let mut failures = Vec::new();
    for (i, run) in runs.into_iter().enumerate() {
        let trace = run?;
        match trace.converged_point() {
            Some(p) => limits.push(p),
            None => failures.push((i, trace.status.name().to_string())),
        }
    }
    if !failures.is_empty() {
        return Ok(UniquenessVerdict::Inconclusive { failures });
    }
    let mut max_spread: f64 = 0.0;
    for i in 0..limits.len() {
        for j in i + 1..limits.len() {
            let d = space.distance(limits[i], limits[j]);
            if d > tol_unique {
                return Ok(UniquenessVerdict::Fail {
                    first: i,
                    second: j,
                    distance: d,
                });
            }
            max_spread = max_spread.max(d);
        }
    }
    Ok(UniquenessVerdict::Pass { limits, max_spread })
}

/// CSV export: `n,point,step_dist,rate_bound,decrease_slack`. `rate_bound` is the
/// Kannan rate bound (when `gamma` is given) and `decrease_slack` the `p = 1`
/// decrease slack `α_n - φ(α_n) - α_{n+1}` (when `phi` is given).
pub fn trace_csv<S: Space>(
    space: &S,
    trace: &IterationTrace<S::Point>,
    gamma: Option<f64>,
    phi: Option<&Modulus>,
) -> Result<String, SolverError> {
    let mut out = String::from("n,point,step_dist,rate_bound,decrease_slack\n");
    let d0 = trace.step_dist.first().copied().unwrap_or(0.0);
    let alpha = trace.gap(space, 1);
    for (n, &p) in trace.iterates.iter().enumerate() {
        let step = trace.step_dist.get(n).map(|d| d.to_string()).unwrap_or_default();
        let bound = match (gamma, trace.step_dist.get(n)) {
            (Some(g), Some(_)) => kannan_rate_bound(g, d0, n)?.to_string(),
            _ => String::new(),
        };
        let slack = match (phi, alpha.get(n), alpha.get(n + 1)) {
            (Some(phi), Some(&a), Some(&b)) => (a - phi.eval(a)? - b).to_string(),
            _ => String::new(),
        };
        let label = space.label(p);
        let label = if label.contains(',') || label.contains('"') {
            format!("\"{}\"", label.replace('"', "\"\""))
        } else {
            label
        };
        writeln!(out, "{n},{label},{step},{bound},{slack}").expect("write to String");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{FiniteSpace, Metric, RealMap, RealSpace, TableMap};

    fn reals(lo: f64, hi: f64) -> RealSpace {
        RealSpace::new(lo, hi, Metric::Abs, 1001).unwrap()
    }

    #[test]
    fn halving_map_converges_geometrically() {
        let space = reals(-1.0, 1.0);
        let map = RealMap::parse("x/2").unwrap();
        let trace = picard(&space, &map, 1.0, StoppingCriteria::new(1e-8, 100)).unwrap();
        assert!(matches!(trace.status, TraceStatus::Converged { .. }));
        assert!(trace.step_dist.len() <= 30);
        for w in trace.step_dist.windows(2) {
            assert_eq!(w[1], w[0] / 2.0);
        }
        assert!(trace.last().abs() < 1e-8);
        assert_eq!(trace.step_dist.len(), trace.iterates.len() - 1);
        assert!(*trace.step_dist.last().unwrap() < 1e-8);
    }

    #[test]
    fn kannan_map_converges_to_zero() {
        let space = reals(0.0, 1.0);
        let map = RealMap::parse("if(x < 0.5, x/4, x/5)").unwrap();
        let trace = picard(&space, &map, 1.0, StoppingCriteria::default()).unwrap();
        let p = trace.converged_point().unwrap();
        assert!(p.abs() < 1e-10);
    }

    #[test]
    fn swap_map_cycles() {
        let space = FiniteSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 1.0).unwrap();
        let swap = TableMap::new(vec![1, 0], 2).unwrap();
        let trace = picard(&space, &swap, 0, StoppingCriteria::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::CycleDetected { first: 0, second: 2 });
        assert_eq!(trace.step_dist, vec![1.0, 1.0]);
    }

    #[test]
    fn fixed_start_converges_immediately() {
        let space = FiniteSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 1.0).unwrap();
        let trace = picard(&space, &TableMap::identity(2), 1, StoppingCriteria::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Converged { point: 1, residual: 0.0 });
        assert_eq!(trace.iterates, vec![1, 1]);
    }

    #[test]
    fn max_iter_and_domain_escape() {
        let space = reals(0.0, 10.0);
        let slow = RealMap::parse("x/(1+x)").unwrap();
        let trace = picard(&space, &slow, 10.0, StoppingCriteria::new(1e-10, 50)).unwrap();
        assert_eq!(trace.status, TraceStatus::MaxIter);
        assert_eq!(trace.iterates.len(), 51);

        let escape = RealMap::parse("2*x + 1").unwrap();
        let err = picard(&space, &escape, 4.0, StoppingCriteria::default()).unwrap_err();
        assert!(matches!(err, SolverError::DomainEscape { index: 2, .. }), "{err:?}");
        assert!(picard(&space, &escape, 11.0, StoppingCriteria::default()).is_err());
        assert!(picard(&space, &slow, 1.0, StoppingCriteria::new(0.0, 5)).is_err());
        assert!(picard(&space, &slow, 1.0, StoppingCriteria::new(1e-3, 0)).is_err());
    }

    #[test]
    fn picard_is_deterministic() {
        let space = reals(0.0, 10.0);
        let map = RealMap::parse("x/(1+x)").unwrap();
        let stop = StoppingCriteria::new(1e-6, 5000);
        let a = picard(&space, &map, 7.3, stop).unwrap();
        let b = picard(&space, &map, 7.3, stop).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rate_and_gap_bounds() {
        assert!((kannan_rate_bound(1.0 / 3.0, 1.0, 2).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(kannan_rate_bound(0.0, 5.0, 1).unwrap(), 0.0);
        assert_eq!(kannan_rate_bound(0.3, 7.0, 0).unwrap(), 7.0);
        assert!(kannan_rate_bound(0.5, 1.0, 1).is_err());
        assert!(kannan_rate_bound(-0.1, 1.0, 1).is_err());
        assert!((kannan_gap_bound(1.0 / 3.0, 1.0, 2, 1).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(kannan_gap_bound(0.0, 1.0, 3, 2).unwrap(), 0.0);
        assert_eq!(kannan_gap_bound(1.0 / 3.0, 0.0, 3, 2).unwrap(), 0.0);
        assert!(kannan_gap_bound(0.2, 1.0, 0, 1).is_err());
    }

    #[test]
    fn kannan_verdicts() {
        let space = reals(0.0, 1.0);
        let map = RealMap::parse("if(x < 0.5, x/4, x/5)").unwrap();
        let trace = picard(&space, &map, 1.0, StoppingCriteria::default()).unwrap();
        let r = verify_kannan_bounds(&space, &trace, 1.0 / 3.0, &[1, 2, 3], 1e-12).unwrap();
        assert!(r.all_ok);

        let two = FiniteSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 1.0).unwrap();
        let swap = TableMap::new(vec![1, 0], 2).unwrap();
        let trace = picard(&two, &swap, 0, StoppingCriteria::default()).unwrap();
        let r = verify_kannan_bounds(&two, &trace, 0.4, &[1], EPS_CHECK).unwrap();
        assert!(!r.all_ok);
        assert_eq!(r.first_violation(), Some(1));

        let trace = picard(&two, &TableMap::identity(2), 0, StoppingCriteria::default()).unwrap();
        assert!(verify_kannan_bounds(&two, &trace, 0.4, &[1, 2], EPS_CHECK).unwrap().all_ok);
    }

    #[test]
    fn decrease_examples() {
        let phi = Modulus::Linear(0.5);
        let v = decrease_verdicts(&[1.0, 0.5, 0.25], 1, &phi, 1e-12).unwrap();
        assert!(v.iter().all(|x| x.ok && x.monotone));
        assert_eq!(v[0].slack, 0.0);
        let v = decrease_verdicts(&[0.3, 0.3, 0.3], 1, &phi, 1e-12).unwrap();
        assert!(v.iter().all(|x| !x.ok));
    }

    #[test]
    fn weak_decrease_on_rational_map() {
        let space = reals(0.0, 10.0);
        let map = RealMap::parse("x/(1+x)").unwrap();
        let phi = Modulus::parse("t^2/(1+t)").unwrap();
        let trace = picard(&space, &map, 10.0, StoppingCriteria::new(1e-6, 5000)).unwrap();
        let r = verify_weak_decrease(&space, &trace, &phi, &[1, 2, 3], 1e-12, 1e-2).unwrap();
        assert!(r.all_ok, "{:?}", r.min_slack);
    }

    #[test]
    fn residual_checks() {
        let space = reals(0.0, 1.0);
        let map = RealMap::parse("if(x < 0.5, x/4, x/5)").unwrap();
        let trace = picard(&space, &map, 1.0, StoppingCriteria::default()).unwrap();
        let sig = SpaceSignature::declared(2, 1.0, true).unwrap();
        let u = trace.converged_point().unwrap();
        let r = verify_residual(&space, &map, &sig, &trace, u, ResidualForm::Kannan(1.0 / 3.0), 1e-8).unwrap();
        assert!(r.ok && r.residual < 1e-8 && !r.degenerate);

        let sig3 = SpaceSignature::declared(1, 3.0, true).unwrap();
        let r = verify_residual(&space, &map, &sig3, &trace, u, ResidualForm::Kannan(1.0 / 3.0), 1e-8).unwrap();
        assert!(r.degenerate && r.bound.is_none() && r.fixed_ok);

        let exact = picard(&space, &map, 0.0, StoppingCriteria::default()).unwrap();
        let sig1 = SpaceSignature::declared(1, 1.0, true).unwrap();
        let r = verify_residual(&space, &map, &sig1, &exact, 0.0, ResidualForm::Weak(&Modulus::Linear(0.5)), 1e-8).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(r.ok);

        let sig5 = SpaceSignature::declared(5, 1.0, true).unwrap();
        assert!(matches!(
            verify_residual(&space, &map, &sig5, &exact, 0.0, ResidualForm::Kannan(0.2), 1e-8),
            Err(SolverError::InsufficientTail { have: 2, need: 6 })
        ));
    }

    #[test]
    fn uniqueness_examples() {
        let space = reals(-10.0, 10.0);
        let half = RealMap::parse("x/2").unwrap();
        let v = check_uniqueness(&space, &half, &[-1.0, 1.0, 10.0], StoppingCriteria::default(), 1e-6).unwrap();
        assert!(v.passed());

        let two = FiniteSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 1.0).unwrap();
        let v = check_uniqueness(&two, &TableMap::identity(2), &[0, 1], StoppingCriteria::default(), 1e-6).unwrap();
        assert!(matches!(v, UniquenessVerdict::Fail { first: 0, second: 1, .. }));

        let swap = TableMap::new(vec![1, 0], 2).unwrap();
        let v = check_uniqueness(&two, &swap, &[0, 1], StoppingCriteria::default(), 1e-6).unwrap();
        assert!(matches!(v, UniquenessVerdict::Inconclusive { .. }));
        assert!(check_uniqueness(&two, &swap, &[0], StoppingCriteria::default(), 1e-6).is_err());
    }

    #[test]
    fn csv_export() {
        let space = reals(-1.0, 1.0);
        let map = RealMap::parse("x/2").unwrap();
        let trace = picard(&space, &map, 1.0, StoppingCriteria::new(0.3, 10)).unwrap();
        let csv = trace_csv(&space, &trace, Some(1.0 / 3.0), Some(&Modulus::Linear(0.5))).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,point,step_dist,rate_bound,decrease_slack");
        assert_eq!(lines[1], "0,1,0.5,0.5,0");
        assert_eq!(lines.len(), trace.iterates.len() + 1);
        assert!(lines.last().unwrap().ends_with(",,,"));
    }
}
