//! Comparison moduli and numerical evidence for contraction-type conditions.
//!
//! For a self-map `S` the pair scan estimates
//!
//! * the Banach constant `c = sup d(Su, Sw) / d(u, w)`,
//! * the Kannan constant `γ = sup d(Su, Sw) / (d(u, Su) + d(w, Sw))`,
//! * the weak-contraction slack `inf d(u, w) - φ(d(u, w)) - d(Su, Sw)`,
//!
//! over an exhaustive or seeded-sampled set of unordered pairs. All three are
//! symmetric in `(u, w)`, so only `i < j` is visited.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, ParseError};
use crate::par::{self, Execution};
use crate::sampling;
use crate::space::{AxiomStatus, MapError, SelfMap, Space, SpaceSignature};
use crate::{Bound, EPS_CHECK, EPS_EQ};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContractionError {
    #[error("map evaluation failed: {0}")]
    Map(#[from] MapError),
    #[error("modulus evaluation failed at t = {0}")]
    ModulusEval(f64),
    #[error("invalid modulus table: {0}")]
    InvalidTable(String),
    #[error("invalid modulus grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Comparison function `φ: [0, ∞) → [0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulus {
    /// `φ(t) = c t`
    Linear(f64),
    /// `φ(t) = coef * t^exponent`
    Power { coef: f64, exponent: f64 },
    /// Piecewise-linear through `(t_i, φ_i)`, starting at `(0, 0)` and held
    /// constant after the last knot.
    Table(Vec<(f64, f64)>),
    /// Expression in `t`.
    Expression(Expr),
}

impl Modulus {
    pub fn parse(source: &str) -> Result<Modulus, ParseError> {
        Expr::parse(source, &["t"]).map(Modulus::Expression)
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Modulus, ContractionError> {
        match knots.first() {
            Some(&(t0, p0)) if t0 == 0.0 && p0 == 0.0 => {}
            _ => return Err(ContractionError::InvalidTable("first knot must be (0, 0)".into())),
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(ContractionError::InvalidTable("knots must be strictly increasing in t".into()));
        }
        if knots.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(ContractionError::InvalidTable("knots must be finite".into()));
        }
        Ok(Modulus::Table(knots))
    }

    pub fn eval(&self, t: f64) -> Result<f64, ContractionError> {
        if !(t >= 0.0) {
            return Err(ContractionError::ModulusEval(t));
        }
        let value = match self {
            Modulus::Linear(c) => c * t,
            Modulus::Power { coef, exponent } => coef * t.powf(*exponent),
            Modulus::Table(knots) => {
                let i = knots.partition_point(|&(ti, _)| ti <= t);
                if i >= knots.len() {
                    knots[knots.len() - 1].1
                } else {
                    let (t0, p0) = knots[i - 1];
                    let (t1, p1) = knots[i];
                    p0 + (p1 - p0) * (t - t0) / (t1 - t0)
                }
            }
            Modulus::Expression(e) => e.eval(&[t]),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ContractionError::ModulusEval(t))
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Modulus::Linear(c) => format!("{c}*t"),
            Modulus::Power { coef, exponent } => format!("{coef}*t^{exponent}"),
            Modulus::Table(knots) => format!("table({} knots)", knots.len()),
            Modulus::Expression(e) => e.source().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusReport {
    pub zero_at_zero: bool,
    /// First positive grid point with `φ(t) <= 0`.
    pub nonpositive_at: Option<f64>,
    /// First consecutive grid pair where `φ` decreases.
    pub decrease_at: Option<(f64, f64)>,
    /// Largest `|φ(t_{i+1}) - φ(t_i)|` over consecutive grid points.
    pub max_jump: f64,
    /// Midpoint values stay between their neighbours' values.
    pub midpoints_bracketed: bool,
    /// Continuity is only ever checked on the grid.
    pub continuity: &'static str,
    pub grid_points: usize,
    pub valid: bool,
}

/// Default modulus grid: `0` followed by 64 geometrically spaced points on
/// `[EPS_EQ, diameter]`.
pub fn default_modulus_grid(diameter: f64) -> Vec<f64> {
    let top = if diameter > EPS_EQ { diameter } else { 1.0 };
    let k = 64;
    let ratio = (top / EPS_EQ).ln() / (k - 1) as f64;
    let mut grid = vec![0.0];
    grid.extend((0..k).map(|i| {
        if i == k - 1 {
            top
        } else {
            EPS_EQ * (ratio * i as f64).exp()
        }
    }));
    grid
}

/// Check `φ(0) = 0`, positivity and monotonicity on `grid`; continuity is
/// approximated by midpoint bracketing.
pub fn validate_modulus(phi: &Modulus, grid: &[f64]) -> Result<ModulusReport, ContractionError> {
    if grid.first() != Some(&0.0) {
        return Err(ContractionError::InvalidGrid("grid must start at 0".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ContractionError::InvalidGrid("grid must be strictly increasing".into()));
    }
    if grid.len() < 17 {
        return Err(ContractionError::InvalidGrid(format!(
            "need at least 16 positive points, got {}",
            grid.len() - 1
        )));
    }
    let values = grid.iter().map(|&t| phi.eval(t)).collect::<Result<Vec<_>, _>>()?;
    let zero_at_zero = values[0].abs() <= EPS_EQ;
    let nonpositive_at = grid
        .iter()
        .zip(&values)
        .skip(1)
        .find(|(_, &p)| p <= 0.0)
        .map(|(&t, _)| t);
    let mut decrease_at = None;
    let mut max_jump: f64 = 0.0;
    let mut midpoints_bracketed = true;
    for i in 0..grid.len() - 1 {
        let (a, b) = (values[i], values[i + 1]);
        max_jump = max_jump.max((b - a).abs());
        if decrease_at.is_none() && !crate::leq_rel(a, b) {
            decrease_at = Some((grid[i], grid[i + 1]));
        }
        let mid = phi.eval(0.5 * (grid[i] + grid[i + 1]))?;
        let (lo, hi) = (a.min(b), a.max(b));
        if !(crate::leq_rel(lo, mid) && crate::leq_rel(mid, hi)) {
            midpoints_bracketed = false;
        }
    }
    let valid = zero_at_zero && nonpositive_at.is_none() && decrease_at.is_none() && midpoints_bracketed;
    Ok(ModulusReport {
        zero_at_zero,
        nonpositive_at,
        decrease_at,
        max_jump,
        midpoints_bracketed,
        continuity: "sampled-only",
        grid_points: grid.len(),
        valid,
    })
}

/// Which unordered pairs of `points` to scan.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSource<P> {
    Exhaustive(Vec<P>),
    /// `pairs` distinct unordered pairs drawn with `seed`.
    Sampled { points: Vec<P>, pairs: u64, seed: u64 },
}

impl<P> PairSource<P> {
    pub fn points(&self) -> &[P] {
        match self {
            PairSource::Exhaustive(p) => p,
            PairSource::Sampled { points, .. } => points,
        }
    }

    /// Exhaustive if all `n(n-1)/2` pairs fit in `budget`, else sampled.
    pub fn with_budget(points: Vec<P>, budget: u64, seed: u64) -> Self {
        let n = points.len() as u64;
        if n * n.saturating_sub(1) / 2 <= budget {
            PairSource::Exhaustive(points)
        } else {
            PairSource::Sampled {
                points,
                pairs: budget,
                seed,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    Exhaustive,
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness<P> {
    pub u: P,
    pub w: P,
    pub numerator: f64,
    pub denominator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakReport<P> {
    pub weak_ok: bool,
    /// `inf d(u,w) - φ(d(u,w)) - d(Su,Sw)`; `0` when no pair was scanned.
    pub min_slack: f64,
    pub witness: Option<PairWitness<P>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport<P> {
    pub banach_c: Bound,
    pub banach_witness: Option<PairWitness<P>>,
    pub kannan_gamma: Bound,
    pub kannan_witness: Option<PairWitness<P>>,
    pub weak: Option<WeakReport<P>>,
    pub pairs_checked: u64,
    pub mode: PairMode,
}

#[derive(Debug, Clone)]
struct Sup {
    value: f64,
    at: Option<(usize, usize, f64, f64)>,
}

impl Sup {
    fn new() -> Self {
        Sup {
            value: 0.0,
            at: None,
        }
    }

    fn offer(&mut self, i: usize, j: usize, num: f64, den: f64) {
        let ratio = if den > EPS_EQ {
            num / den
        } else if num > EPS_EQ {
            f64::INFINITY
        } else {
            return;
        };
        if self.at.is_none() || ratio > self.value {
            self.value = ratio;
            self.at = Some((i, j, num, den));
        }
    }

    fn merge(self, other: Sup) -> Sup {
        match (&self.at, &other.at) {
            (_, None) => self,
            (None, _) => other,
            _ if other.value > self.value => other,
            _ => self,
        }
    }
}

#[derive(Debug, Clone)]
struct Inf {
    value: f64,
    at: Option<(usize, usize, f64, f64)>,
    failed: Option<f64>,
}

impl Inf {
    fn new() -> Self {
        Inf {
            value: f64::INFINITY,
            at: None,
            failed: None,
        }
    }

    fn merge(self, other: Inf) -> Inf {
        let failed = self.failed.or(other.failed);
        let mut out = if other.value < self.value { other } else { self };
        out.failed = failed;
        out
    }
}

#[derive(Debug, Clone)]
struct Acc {
    banach: Sup,
    kannan: Sup,
    weak: Inf,
    pairs: u64,
}

impl Acc {
    fn new() -> Self {
        Acc {
            banach: Sup::new(),
            kannan: Sup::new(),
            weak: Inf::new(),
            pairs: 0,
        }
    }

    fn merge(self, other: Acc) -> Acc {
        Acc {
            banach: self.banach.merge(other.banach),
            kannan: self.kannan.merge(other.kannan),
            weak: self.weak.merge(other.weak),
            pairs: self.pairs + other.pairs,
        }
    }
}

/// Scan all requested pairs once and report every estimate.
pub fn analyze_map<S, M>(
    space: &S,
    map: &M,
    pairs: &PairSource<S::Point>,
    phi: Option<&Modulus>,
) -> Result<ContractionReport<S::Point>, ContractionError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    analyze_map_with(space, map, pairs, phi, Execution::default())
}

pub fn analyze_map_with<S, M>(
    space: &S,
    map: &M,
    pairs: &PairSource<S::Point>,
    phi: Option<&Modulus>,
    exec: Execution,
) -> Result<ContractionReport<S::Point>, ContractionError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let points = pairs.points();
    let images = points.iter().map(|&p| map.apply(p)).collect::<Result<Vec<_>, _>>()?;
    let moved: Vec<f64> = points.iter().zip(&images).map(|(&p, &q)| space.distance(p, q)).collect();

    let visit = |acc: &mut Acc, i: usize, j: usize| {
        let d = space.distance(points[i], points[j]);
        let num = space.distance(images[i], images[j]);
        acc.pairs += 1;
        acc.banach.offer(i, j, num, d);
        acc.kannan.offer(i, j, num, moved[i] + moved[j]);
        if let Some(phi) = phi {
            match phi.eval(d) {
                Ok(f) => {
                    let slack = d - f - num;
                    if slack < acc.weak.value {
                        acc.weak.value = slack;
                        acc.weak.at = Some((i, j, num, d));
                    }
                }
                Err(_) => {
                    acc.weak.failed.get_or_insert(d);
                }
            }
        }
    };

    let n = points.len();
    let (acc, mode) = match pairs {
        PairSource::Exhaustive(_) => {
            let acc = par::map_reduce(
                exec,
                n,
                Acc::new(),
                |i| {
                    let mut acc = Acc::new();
                    for j in i + 1..n {
                        visit(&mut acc, i, j);
                    }
                    acc
                },
                Acc::merge,
            );
            (acc, PairMode::Exhaustive)
        }
        PairSource::Sampled { pairs, seed, .. } => {
            let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
            let picked = sampling::sample_distinct(total, *pairs, *seed);
            let decoded: Vec<(usize, usize)> = picked.iter().map(|&k| decode_pair(k, n)).collect();
            let acc = par::map_reduce(
                exec,
                decoded.len(),
                Acc::new(),
                |k| {
                    let mut acc = Acc::new();
                    let (i, j) = decoded[k];
                    visit(&mut acc, i, j);
                    acc
                },
                Acc::merge,
            );
            (acc, PairMode::Sampled { seed: *seed })
        }
    };

    if let Some(t) = acc.weak.failed {
        return Err(ContractionError::ModulusEval(t));
    }
    let witness = |at: Option<(usize, usize, f64, f64)>| {
        at.map(|(i, j, numerator, denominator)| PairWitness {
            u: points[i],
            w: points[j],
            numerator,
            denominator,
        })
    };
    let weak = phi.map(|_| {
        let min_slack = if acc.weak.at.is_some() { acc.weak.value } else { 0.0 };
        WeakReport {
            weak_ok: min_slack >= -EPS_CHECK,
            min_slack,
            witness: witness(acc.weak.at),
        }
    });
    Ok(ContractionReport {
        banach_c: Bound::from_f64(acc.banach.value),
        banach_witness: witness(acc.banach.at),
        kannan_gamma: Bound::from_f64(acc.kannan.value),
        kannan_witness: witness(acc.kannan.at),
        weak,
        pairs_checked: acc.pairs,
        mode,
    })
}

/// Unordered pair index `k` in row-major `i < j` order.
fn decode_pair(k: u64, n: usize) -> (usize, usize) {
    let n = n as u64;
    // row i starts at i*n - i*(i+1)/2
    let row_start = |i: u64| i * n - i * (i + 1) / 2;
    let mut i = {
        let nf = n as f64;
        let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * k as f64;
        (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor().max(0.0) as u64
    };
    while i > 0 && row_start(i) > k {
        i -= 1;
    }
    while i + 1 < n && row_start(i + 1) <= k {
        i += 1;
    }
    let j = i + 1 + (k - row_start(i));
    (i as usize, j as usize)
}

/// `sup d(Su, Sw) / d(u, w)` over pairs with `d(u, w) > EPS_EQ`.
pub fn estimate_banach_c<S, M>(
    space: &S,
    map: &M,
    pairs: &PairSource<S::Point>,
) -> Result<(Bound, Option<PairWitness<S::Point>>), ContractionError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let r = analyze_map(space, map, pairs, None)?;
    Ok((r.banach_c, r.banach_witness))
}

/// `sup d(Su, Sw) / (d(u, Su) + d(w, Sw))` over pairs with a positive
/// denominator.
pub fn estimate_kannan_gamma<S, M>(
    space: &S,
    map: &M,
    pairs: &PairSource<S::Point>,
) -> Result<(Bound, Option<PairWitness<S::Point>>), ContractionError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let r = analyze_map(space, map, pairs, None)?;
    Ok((r.kannan_gamma, r.kannan_witness))
}

pub fn check_weak_contractive<S, M>(
    space: &S,
    map: &M,
    phi: &Modulus,
    pairs: &PairSource<S::Point>,
) -> Result<WeakReport<S::Point>, ContractionError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let r = analyze_map(space, map, pairs, Some(phi))?;
    Ok(r.weak.expect("modulus supplied"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Weakly contractive maps.
    WeakContraction,
    /// Kannan-type maps with `s γ <= 1`.
    Kannan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub condition: String,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub theorem: Theorem,
    pub satisfied: bool,
    pub details: Vec<Verdict>,
}

impl HypothesisReport {
    pub fn failed_conditions(&self) -> impl Iterator<Item = &str> {
        self.details.iter().filter(|d| !d.verdict).map(|d| d.condition.as_str())
    }
}

/// Check the fixed-point theorem hypotheses against the numerical evidence.
/// `phi` is the validation report of the modulus used for the weak check.
pub fn check_hypotheses<P>(
    signature: &SpaceSignature,
    report: &ContractionReport<P>,
    phi: Option<&ModulusReport>,
    theorem: Theorem,
) -> HypothesisReport {
    let mut details = Vec::new();
    let mut push = |condition: &str, verdict: bool| {
        details.push(Verdict {
            condition: condition.to_string(),
            verdict,
        })
    };
    push(
        "b_v(s) axioms not refuted",
        !matches!(signature.axiom_status, AxiomStatus::Failed { .. }),
    );
    match theorem {
        Theorem::WeakContraction => {
            push("weakly contractive", report.weak.as_ref().is_some_and(|w| w.weak_ok));
            push("φ valid", phi.is_some_and(|p| p.valid));
        }
        Theorem::Kannan => {
            push("γ < 1/2", report.kannan_gamma.below(0.5));
            let product = report.kannan_gamma.value().map(|g| g * signature.s);
            push("sγ ≤ 1", product.is_some_and(|p| p <= 1.0 + EPS_CHECK));
        }
    }
    push("space complete (declared)", signature.complete);
    HypothesisReport {
        theorem,
        satisfied: details.iter().all(|d| d.verdict),
        details,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{uniform_grid, FiniteSpace, Metric, RealMap, RealSpace, TableMap};

    fn real(lo: f64, hi: f64) -> RealSpace {
        RealSpace::new(lo, hi, Metric::Abs, 1001).unwrap()
    }

    #[test]
    fn pair_decoding_matches_row_major_order() {
        for n in [2usize, 3, 7, 50] {
            let mut k = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    assert_eq!(decode_pair(k, n), (i, j), "n={n} k={k}");
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn modulus_examples() {
        let grid = uniform_grid(0.0, 10.0, 101);
        assert!(validate_modulus(&Modulus::Linear(0.5), &grid).unwrap().valid);
        let constant = validate_modulus(&Modulus::parse("0.1").unwrap(), &grid).unwrap();
        assert!(!constant.valid && !constant.zero_at_zero);
        let rational = validate_modulus(&Modulus::parse("t^2/(1+t)").unwrap(), &grid).unwrap();
        assert!(rational.valid);
        assert_eq!(rational.continuity, "sampled-only");
        let decreasing = validate_modulus(&Modulus::parse("t*(5-t)").unwrap(), &grid).unwrap();
        assert!(!decreasing.valid && decreasing.decrease_at.is_some());
        let power = Modulus::Power {
            coef: 0.5,
            exponent: 2.0,
        };
        assert!(validate_modulus(&power, &default_modulus_grid(10.0)).unwrap().valid);
    }

    #[test]
    fn modulus_grid_preconditions() {
        assert!(validate_modulus(&Modulus::Linear(1.0), &[0.0, 1.0, 2.0]).is_err());
        assert!(validate_modulus(&Modulus::Linear(1.0), &uniform_grid(1.0, 2.0, 20)).is_err());
        let g = default_modulus_grid(5.0);
        assert_eq!(g.len(), 65);
        assert_eq!(g[1], EPS_EQ);
        assert_eq!(*g.last().unwrap(), 5.0);
    }

    #[test]
    fn modulus_table() {
        let phi = Modulus::table(vec![(0.0, 0.0), (1.0, 0.5), (3.0, 1.0)]).unwrap();
        assert_eq!(phi.eval(0.5).unwrap(), 0.25);
        assert_eq!(phi.eval(2.0).unwrap(), 0.75);
        assert_eq!(phi.eval(10.0).unwrap(), 1.0);
        assert!(phi.eval(-1.0).is_err());
        assert!(Modulus::table(vec![(0.0, 0.1)]).is_err());
        assert!(Modulus::table(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn banach_estimates() {
        let space = real(-1.0, 1.0);
        let grid = PairSource::Exhaustive(uniform_grid(-1.0, 1.0, 101));
        let half = RealMap::parse("x/2").unwrap();
        let (c, _) = estimate_banach_c(&space, &half, &grid).unwrap();
        assert!((c.value().unwrap() - 0.5).abs() < 1e-12);
        let id = RealMap::parse("x").unwrap();
        assert_eq!(estimate_banach_c(&space, &id, &grid).unwrap().0, Bound::Finite(1.0));

        let space = real(0.0, 10.0);
        let map = RealMap::parse("x/(1+x)").unwrap();
        let coarse = PairSource::Exhaustive(uniform_grid(0.0, 10.0, 11));
        let fine = PairSource::Exhaustive(uniform_grid(0.0, 10.0, 1001));
        let c1 = estimate_banach_c(&space, &map, &coarse).unwrap().0.value().unwrap();
        let c2 = estimate_banach_c(&space, &map, &fine).unwrap().0.value().unwrap();
        // sup over the grid is attained at (0, h): 1/(1+h)
        assert!((c1 - 0.5).abs() < 1e-12);
        assert!((c2 - 1.0 / 1.01).abs() < 1e-12);
        assert!(c1 < c2 && c2 < 1.0);
    }

    #[test]
    fn kannan_estimates() {
        let space = real(0.0, 1.0);
        let grid = PairSource::Exhaustive(uniform_grid(0.0, 1.0, 1001));
        let map = RealMap::parse("if(x < 0.5, x/4, x/5)").unwrap();
        let (g, _) = estimate_kannan_gamma(&space, &map, &grid).unwrap();
        let g = g.value().unwrap();
        assert!(g > 0.0 && g < 0.5, "gamma = {g}");

        let constant = RealMap::parse("0.3").unwrap();
        assert_eq!(estimate_kannan_gamma(&space, &constant, &grid).unwrap().0, Bound::Finite(0.0));

        let two = FiniteSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 1.0).unwrap();
        let (g, w) = estimate_kannan_gamma(&two, &TableMap::identity(2), &PairSource::Exhaustive(two.points())).unwrap();
        assert_eq!(g, Bound::Unbounded);
        assert_eq!(w.unwrap().numerator, 1.0);
    }

    #[test]
    fn weak_contraction_examples() {
        let space = real(0.0, 10.0);
        let grid = PairSource::Exhaustive(uniform_grid(0.0, 10.0, 1001));
        let map = RealMap::parse("x/(1+x)").unwrap();
        let phi = Modulus::parse("t^2/(1+t)").unwrap();
        let weak = check_weak_contractive(&space, &map, &phi, &grid).unwrap();
        assert!(weak.weak_ok && weak.min_slack >= -1e-12);

        let id = RealMap::parse("x").unwrap();
        let weak = check_weak_contractive(&space, &id, &Modulus::Linear(0.5), &grid).unwrap();
        assert!(!weak.weak_ok);
        assert!(weak.witness.is_some());

        let lin = RealMap::parse("0.3*x").unwrap();
        let weak = check_weak_contractive(&space, &lin, &Modulus::Linear(0.7), &grid).unwrap();
        assert!(weak.weak_ok);
        assert!(weak.min_slack.abs() < 1e-12);
    }

    #[test]
    fn sampled_pairs_are_reproducible() {
        let space = real(0.0, 10.0);
        let map = RealMap::parse("x/(1+x)").unwrap();
        let src = PairSource::with_budget(uniform_grid(0.0, 10.0, 1001), 1000, 5);
        assert!(matches!(src, PairSource::Sampled { .. }));
        let a = analyze_map(&space, &map, &src, None).unwrap();
        let b = analyze_map_with(&space, &map, &src, None, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.pairs_checked, 1000);
        assert_eq!(a.mode, PairMode::Sampled { seed: 5 });
    }

    #[test]
    fn hypotheses() {
        let sig = |s: f64| SpaceSignature::declared(1, s, true).unwrap();
        let report = |gamma: f64| ContractionReport::<usize> {
            banach_c: Bound::Finite(1.0),
            banach_witness: None,
            kannan_gamma: Bound::Finite(gamma),
            kannan_witness: None,
            weak: Some(WeakReport {
                weak_ok: true,
                min_slack: 0.0,
                witness: None,
            }),
            pairs_checked: 1,
            mode: PairMode::Exhaustive,
        };
        assert!(check_hypotheses(&sig(2.0), &report(0.4), None, Theorem::Kannan).satisfied);
        let h = check_hypotheses(&sig(3.0), &report(0.4), None, Theorem::Kannan);
        assert!(!h.satisfied);
        assert_eq!(h.failed_conditions().collect::<Vec<_>>(), vec!["sγ ≤ 1"]);
        let h = check_hypotheses(&sig(1.0), &report(0.5), None, Theorem::Kannan);
        assert_eq!(h.failed_conditions().collect::<Vec<_>>(), vec!["γ < 1/2"]);

        let grid = uniform_grid(0.0, 1.0, 20);
        let valid = validate_modulus(&Modulus::Linear(0.5), &grid).unwrap();
        assert!(check_hypotheses(&sig(1.0), &report(0.4), Some(&valid), Theorem::WeakContraction).satisfied);
        assert!(!check_hypotheses(&sig(1.0), &report(0.4), None, Theorem::WeakContraction).satisfied);
        let incomplete = SpaceSignature::declared(1, 1.0, false).unwrap();
        assert!(!check_hypotheses(&incomplete, &report(0.4), Some(&valid), Theorem::WeakContraction).satisfied);
    }
}
