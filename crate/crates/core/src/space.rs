//! Metric-like spaces, self-maps on them, and the b_v(s) axiom checker.
//!
//! A b_v(s) space relaxes the triangle inequality to a polygon inequality:
//! for all `u != w` and all pairwise distinct `z_1..z_v`, each different
//! from `u` and `w`,
//!
//! ```text
//! d(u, w) <= s * [d(u, z_1) + d(z_1, z_2) + ... + d(z_v, w)]
//! ```
//!
//! together with `d(u, w) = 0` iff `u = w` and symmetry. `v = 1` is a
//! b-metric space, `v = 2, s = 1` a rectangular metric space.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, ParseError};
use crate::par::{self, Execution};
use crate::sampling;
use crate::{Bound, EPS_EQ};

/// A space with a distance function.
pub trait Space: Sync {
    type Point: Copy + PartialEq + Send + Sync + fmt::Debug + Serialize;

    fn distance(&self, a: Self::Point, b: Self::Point) -> f64;

    /// Whether `p` belongs to the declared domain.
    fn contains(&self, p: Self::Point) -> bool;

    fn label(&self, p: Self::Point) -> String;

    /// Iterate coincidence: index equality for finite spaces, `d <= EPS_EQ`
    /// otherwise.
    fn coincide(&self, a: Self::Point, b: Self::Point) -> bool {
        self.distance(a, b) <= EPS_EQ
    }
}

/// A self-map `S` on a space whose points are `P`.
pub trait SelfMap<P>: Sync {
    fn apply(&self, p: P) -> Result<P, MapError>;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("point index {0} is outside the map table")]
    OutOfTable(usize),
    #[error("map evaluated to a non-finite value at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("distance matrix has {rows} rows but {points} points")]
    SizeMismatch { rows: usize, points: usize },
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("nonzero diagonal: d[{0}][{0}] = {1}")]
    NonzeroDiagonal(usize, f64),
    #[error("asymmetric distance: d[{i}][{j}] = {a} but d[{j}][{i}] = {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("negative distance d[{i}][{j}] = {value}")]
    Negative { i: usize, j: usize, value: f64 },
    #[error("non-finite distance d[{i}][{j}]")]
    NonFinite { i: usize, j: usize },
    #[error("space has no points")]
    Empty,
    #[error("invalid domain [{lo}, {hi}] with {sampler_n} sample points")]
    InvalidDomain { lo: f64, hi: f64, sampler_n: usize },
    #[error("v must be at least 1")]
    ZeroV,
    #[error("s must be a finite real >= 1, got {0}")]
    InvalidS(f64),
    #[error("tuple budget must be at least 1")]
    ZeroBudget,
    #[error("admissible tuple space for n = {n}, v = {v} does not fit in 64 bits")]
    TupleSpaceTooLarge { n: usize, v: usize },
    #[error("map table target {target} at position {index} is out of range for {n} points")]
    TableTarget { index: usize, target: usize, n: usize },
    #[error("map table has {len} entries for {n} points")]
    TableLength { len: usize, n: usize },
    #[error(transparent)]
    Expr(#[from] ParseError),
}

/// Finite, matrix-backed space. Points are indices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    n: usize,
    d: Vec<f64>,
}

impl FiniteSpace {
    /// Build from labels and a full distance matrix. Validates shape, finite
    /// nonnegative entries, zero diagonal (within `EPS_EQ`) and exact symmetry.
    pub fn new(labels: Vec<String>, matrix: &[Vec<f64>]) -> Result<Self, SpaceError> {
        let n = labels.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        if matrix.len() != n {
            return Err(SpaceError::SizeMismatch {
                rows: matrix.len(),
                points: n,
            });
        }
        let mut d = Vec::with_capacity(n * n);
        for (row, entries) in matrix.iter().enumerate() {
            if entries.len() != n {
                return Err(SpaceError::RaggedRow {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            d.extend_from_slice(entries);
        }
        let space = FiniteSpace { labels, n, d };
        space.validate()?;
        Ok(space)
    }

    /// Build from a distance function on indices; `f` is only evaluated for
    /// `i < j` and mirrored.
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> f64) -> Result<Self, SpaceError> {
        let n = labels.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let space = FiniteSpace { labels, n, d };
        space.validate()?;
        Ok(space)
    }

    /// Points on the real line with distance `f(x, y)`, labeled by value.
    pub fn on_line(xs: &[f64], f: impl Fn(f64, f64) -> f64) -> Result<Self, SpaceError> {
        let labels = xs.iter().map(|x| format!("{x}")).collect();
        Self::from_fn(labels, |i, j| f(xs[i], xs[j]))
    }

    fn validate(&self) -> Result<(), SpaceError> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let a = self.d[i * n + j];
                if !a.is_finite() {
                    return Err(SpaceError::NonFinite { i, j });
                }
                if a < 0.0 {
                    return Err(SpaceError::Negative { i, j, value: a });
                }
            }
            let diag = self.d[i * n + i];
            if diag.abs() > EPS_EQ {
                return Err(SpaceError::NonzeroDiagonal(i, diag));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (self.d[i * n + j], self.d[j * n + i]);
                if a != b {
                    return Err(SpaceError::Asymmetric { i, j, a, b });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n).map(|row| row.to_vec()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Same space with every distance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> FiniteSpace {
        FiniteSpace {
            labels: self.labels.clone(),
            n: self.n,
            d: self.d.iter().map(|x| x * factor).collect(),
        }
    }

    /// Relabel points: point `i` of the result is point `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> FiniteSpace {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = self.d(perm[i], perm[j]);
            }
        }
        FiniteSpace {
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
            n,
            d,
        }
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
}

impl Space for FiniteSpace {
    type Point = usize;

    fn distance(&self, a: usize, b: usize) -> f64 {
        self.d(a, b)
    }

    fn contains(&self, p: usize) -> bool {
        p < self.n
    }

    fn label(&self, p: usize) -> String {
        self.labels[p].clone()
    }

    fn coincide(&self, a: usize, b: usize) -> bool {
        a == b
    }
}

/// Table-backed map on a finite space: `S(i) = targets[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableMap {
    targets: Vec<usize>,
}

impl TableMap {
    pub fn new(targets: Vec<usize>, n: usize) -> Result<Self, SpaceError> {
        if targets.len() != n {
            return Err(SpaceError::TableLength {
                len: targets.len(),
                n,
            });
        }
        if let Some((index, &target)) = targets.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(SpaceError::TableTarget { index, target, n });
        }
        Ok(TableMap { targets })
    }

    pub fn identity(n: usize) -> Self {
        TableMap {
            targets: (0..n).collect(),
        }
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Conjugate by a relabeling (see [`FiniteSpace::permuted`]).
    pub fn permuted(&self, perm: &[usize]) -> TableMap {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        TableMap {
            targets: perm.iter().map(|&p| inverse[self.targets[p]]).collect(),
        }
    }
}

impl SelfMap<usize> for TableMap {
    fn apply(&self, p: usize) -> Result<usize, MapError> {
        self.targets.get(p).copied().ok_or(MapError::OutOfTable(p))
    }
}

/// Distance on a real interval.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// `|x - y|`
    Abs,
    /// Expression in `x` and `y`.
    Expr(Expr),
}

impl Metric {
    pub fn parse(source: &str) -> Result<Metric, ParseError> {
        let compact: String = source.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "abs(x-y)" {
            return Ok(Metric::Abs);
        }
        Expr::parse(source, &["x", "y"]).map(Metric::Expr)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Metric::Abs => (x - y).abs(),
            Metric::Expr(e) => e.eval(&[x, y]),
        }
    }

    pub fn source(&self) -> String {
        match self {
            Metric::Abs => "abs(x - y)".to_string(),
            Metric::Expr(e) => e.source().to_string(),
        }
    }
}

/// Function-backed space on the interval `[lo, hi]`. Axiom checks run on the
/// `sampler_n`-point uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpace {
    pub lo: f64,
    pub hi: f64,
    pub metric: Metric,
    pub sampler_n: usize,
}

impl RealSpace {
    pub fn new(lo: f64, hi: f64, metric: Metric, sampler_n: usize) -> Result<Self, SpaceError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi && sampler_n >= 2) {
            return Err(SpaceError::InvalidDomain { lo, hi, sampler_n });
        }
        Ok(RealSpace {
            lo,
            hi,
            metric,
            sampler_n,
        })
    }

    /// Uniform grid with exact endpoints.
    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.lo, self.hi, self.sampler_n)
    }

    /// `n` seeded uniform draws from the domain.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        use rand::Rng;
        let mut rng = sampling::rng(seed);
        (0..n).map(|_| rng.gen_range(self.lo..=self.hi)).collect()
    }

    /// Finite subspace on the given points. Function-backed distances must be
    /// zero on the diagonal and symmetric within `EPS_EQ`.
    pub fn restrict(&self, points: &[f64]) -> Result<FiniteSpace, SpaceError> {
        let n = points.len();
        for (i, &p) in points.iter().enumerate() {
            let diag = self.metric.eval(p, p);
            if !(diag.abs() <= EPS_EQ) {
                return Err(SpaceError::NonzeroDiagonal(i, diag));
            }
            for (j, &q) in points.iter().enumerate().skip(i + 1) {
                let (a, b) = (self.metric.eval(p, q), self.metric.eval(q, p));
                if !(a - b).abs().le(&EPS_EQ) {
                    return Err(SpaceError::Asymmetric { i, j, a, b });
                }
            }
        }
        let labels = points.iter().map(|x| format!("{x}")).collect();
        let space = FiniteSpace::from_fn(labels, |i, j| self.metric.eval(points[i], points[j]))?;
        debug_assert_eq!(space.len(), n);
        Ok(space)
    }

    pub fn diameter_estimate(&self) -> f64 {
        let grid = self.grid();
        let mut best: f64 = 0.0;
        for &x in &[self.lo, self.hi] {
            for &y in &grid {
                best = best.max(self.metric.eval(x, y));
            }
        }
        best
    }
}

pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
                }
            })
            .collect(),
    }
}

impl Space for RealSpace {
    type Point = f64;

    fn distance(&self, a: f64, b: f64) -> f64 {
        self.metric.eval(a, b)
    }

    fn contains(&self, p: f64) -> bool {
        p.is_finite() && p >= self.lo - EPS_EQ && p <= self.hi + EPS_EQ
    }

    fn label(&self, p: f64) -> String {
        format!("{p}")
    }
}

/// Expression-backed map `S(x)` on a real interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMap {
    expr: Expr,
}

impl RealMap {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Ok(RealMap {
            expr: Expr::parse(source, &["x"])?,
        })
    }

    pub fn source(&self) -> &str {
        self.expr.source()
    }
}

impl SelfMap<f64> for RealMap {
    fn apply(&self, x: f64) -> Result<f64, MapError> {
        let y = self.expr.eval(&[x]);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(MapError::NonFinite(x))
        }
    }
}

// ---------------------------------------------------------------------------
// Axiom checking
// ---------------------------------------------------------------------------

/// A polygon-inequality tuple `(u, w, z_1..z_v)` with its two sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub tuple: Vec<usize>,
    pub lhs: f64,
    pub path_sum: f64,
}

impl Witness {
    /// `"(0,2,1): 4 > 2"` style rendering using the space's labels.
    pub fn describe(&self, space: &FiniteSpace, s: f64) -> String {
        let labels: Vec<&str> = self.tuple.iter().map(|&i| space.labels()[i].as_str()).collect();
        let rhs = s * self.path_sum;
        let rel = if crate::leq_rel(self.lhs, rhs) { "<=" } else { ">" };
        format!("({}): {} {} {}", labels.join(","), self.lhs, rel, rhs)
    }

    pub fn ratio(&self) -> Bound {
        if self.path_sum > EPS_EQ {
            Bound::Finite(self.lhs / self.path_sum)
        } else {
            Bound::Unbounded
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub v: usize,
    pub s: f64,
    pub points: usize,
    /// `d(u, w) = 0` exactly when `u = w`.
    pub condition1_ok: bool,
    /// `d(u, w) = d(w, u)`.
    pub condition2_ok: bool,
    /// Polygon inequality with constant `s` on every checked tuple.
    pub condition3_ok: bool,
    /// Sup of `d(u, w) / path_sum` over checked tuples.
    pub worst_ratio: Bound,
    pub witness: Option<Witness>,
    /// Ordered tuples covered by the check.
    pub tuples_checked: u64,
    /// Tuples with zero path sum and zero `d(u, w)`.
    pub zero_tuples_skipped: u64,
    /// Size of the full admissible tuple space.
    pub admissible_tuples: u64,
    pub mode: CheckMode,
    /// No admissible tuple exists (`v >= n - 1`).
    pub vacuous: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.condition1_ok && self.condition2_ok && self.condition3_ok
    }

    pub fn status(&self) -> AxiomStatus {
        if !self.passed() {
            return AxiomStatus::Failed {
                witness: if self.condition3_ok { None } else { self.witness.clone() },
            };
        }
        if self.vacuous {
            return AxiomStatus::Vacuous;
        }
        match self.mode {
            CheckMode::Exhaustive => AxiomStatus::VerifiedExhaustive,
            CheckMode::Sampled { samples, seed } => AxiomStatus::VerifiedSampled { samples, seed },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomStatus {
    /// Parameters taken from an instance file, not checked.
    Declared,
    VerifiedExhaustive,
    VerifiedSampled { samples: u64, seed: u64 },
    Vacuous,
    Failed { witness: Option<Witness> },
}

/// Claimed or verified `(v, s)` parameters of a space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceSignature {
    pub v: usize,
    pub s: f64,
    /// Declared only; completeness is never tested.
    pub complete: bool,
    pub axiom_status: AxiomStatus,
}

impl SpaceSignature {
    pub fn declared(v: usize, s: f64, complete: bool) -> Result<Self, SpaceError> {
        validate_params(v, s)?;
        Ok(SpaceSignature {
            v,
            s,
            complete,
            axiom_status: AxiomStatus::Declared,
        })
    }
}

fn validate_params(v: usize, s: f64) -> Result<(), SpaceError> {
    if v == 0 {
        return Err(SpaceError::ZeroV);
    }
    if !(s.is_finite() && s >= 1.0) {
        return Err(SpaceError::InvalidS(s));
    }
    Ok(())
}

/// Number of ordered admissible tuples `(u, w, z_1..z_v)` on `n` points,
/// or `None` on overflow.
pub fn admissible_tuple_count(n: usize, v: usize) -> Option<u64> {
    if n < v + 2 {
        return Some(0);
    }
    let mut count: u64 = (n as u64).checked_mul(n as u64 - 1)?;
    for i in 0..v {
        count = count.checked_mul((n - 2 - i) as u64)?;
    }
    Some(count)
}

/// Sampled tuples handled per parallel task.
const SAMPLE_CHUNK: usize = 4096;

/// Decode a lexicographic tuple index into `(u, w, z_1..z_v)`.
fn decode_tuple(mut index: u64, n: usize, v: usize, out: &mut Vec<usize>, used: &mut Vec<usize>) {
    let len = v + 2;
    out.clear();
    out.resize(len, 0);
    for pos in (0..len).rev() {
        let radix = (n - pos) as u64;
        out[pos] = (index % radix) as usize;
        index /= radix;
    }
    used.clear();
    for slot in out.iter_mut() {
        let digit = *slot;
        // digit-th point not yet used, in ascending order
        let mut p = digit;
        for &u in used.iter() {
            if u <= p {
                p += 1;
            }
        }
        let at = used.partition_point(|&u| u < p);
        used.insert(at, p);
        *slot = p;
    }
}

#[derive(Debug, Clone)]
struct Worst {
    ratio: f64,
    witness: Option<Witness>,
    checked: u64,
    skipped: u64,
}

impl Worst {
    fn empty() -> Self {
        Worst {
            ratio: f64::NEG_INFINITY,
            witness: None,
            checked: 0,
            skipped: 0,
        }
    }

    /// Record one tuple; `tuple` is only cloned when it becomes the witness.
    fn record(&mut self, tuple: &[usize], lhs: f64, path: f64, weight: u64) {
        self.checked += weight;
        let ratio = if path > EPS_EQ {
            lhs / path
        } else if lhs > EPS_EQ {
            f64::INFINITY
        } else {
            self.skipped += weight;
            return;
        };
        if ratio > self.ratio {
            self.ratio = ratio;
            self.witness = Some(Witness {
                tuple: tuple.to_vec(),
                lhs,
                path_sum: path,
            });
        }
    }

    fn merge(mut self, other: Worst) -> Worst {
        self.checked += other.checked;
        self.skipped += other.skipped;
        if other.ratio > self.ratio {
            self.ratio = other.ratio;
            self.witness = other.witness;
        }
        self
    }
}

fn path_sum(space: &FiniteSpace, tuple: &[usize]) -> f64 {
    let (u, w, zs) = (tuple[0], tuple[1], &tuple[2..]);
    let mut sum = 0.0;
    let mut prev = u;
    for &z in zs {
        sum += space.d(prev, z);
        prev = z;
    }
    sum + space.d(prev, w)
}

/// All `z`-sequences for fixed `u < w`, depth first in lexicographic order.
fn enumerate_for_pair(space: &FiniteSpace, u: usize, w: usize, v: usize, acc: &mut Worst) {
    let n = space.len();
    let mut tuple = Vec::with_capacity(v + 2);
    tuple.push(u);
    tuple.push(w);
    let mut used = vec![false; n];
    used[u] = true;
    used[w] = true;
    let lhs = space.d(u, w);

    #[allow(clippy::too_many_arguments)]
    fn rec(
        space: &FiniteSpace,
        tuple: &mut Vec<usize>,
        used: &mut [bool],
        prev: usize,
        partial: f64,
        remaining: usize,
        lhs: f64,
        acc: &mut Worst,
    ) {
        if remaining == 0 {
            let path = partial + space.d(prev, tuple[1]);
            // (u, w, z..) and (w, u, z reversed) share both sides
            acc.record(tuple, lhs, path, 2);
            return;
        }
        for z in 0..space.len() {
            if used[z] {
                continue;
            }
            used[z] = true;
            tuple.push(z);
            rec(space, tuple, used, z, partial + space.d(prev, z), remaining - 1, lhs, acc);
            tuple.pop();
            used[z] = false;
        }
    }

    rec(space, &mut tuple, &mut used, u, 0.0, v, lhs, acc);
}

fn conditions_1_2(space: &FiniteSpace) -> (bool, bool) {
    let n = space.len();
    let mut c1 = true;
    let mut c2 = true;
    for i in 0..n {
        if space.d(i, i).abs() > EPS_EQ {
            c1 = false;
        }
        for j in i + 1..n {
            if space.d(i, j) <= EPS_EQ {
                c1 = false;
            }
            if space.d(i, j) != space.d(j, i) {
                c2 = false;
            }
        }
    }
    (c1, c2)
}

/// Check the three axioms (zero distance iff equal, symmetry, polygon
/// inequality with constant `s`). Exhaustive when the admissible
/// tuple count fits in `budget`, else `budget` tuples drawn without
/// replacement with `seed`.
pub fn check_axioms(
    space: &FiniteSpace,
    v: usize,
    s: f64,
    budget: u64,
    seed: u64,
) -> Result<AxiomReport, SpaceError> {
    check_axioms_with(space, v, s, budget, seed, Execution::default())
}

pub fn check_axioms_with(
    space: &FiniteSpace,
    v: usize,
    s: f64,
    budget: u64,
    seed: u64,
    exec: Execution,
) -> Result<AxiomReport, SpaceError> {
    validate_params(v, s)?;
    if budget == 0 {
        return Err(SpaceError::ZeroBudget);
    }
    let n = space.len();
    let admissible =
        admissible_tuple_count(n, v).ok_or(SpaceError::TupleSpaceTooLarge { n, v })?;
    let (condition1_ok, condition2_ok) = conditions_1_2(space);

    let (worst, mode) = if admissible <= budget {
        let worst = par::map_reduce(
            exec,
            n,
            Worst::empty(),
            |u| {
                let mut acc = Worst::empty();
                for w in u + 1..n {
                    enumerate_for_pair(space, u, w, v, &mut acc);
                }
                acc
            },
            Worst::merge,
        );
        (worst, CheckMode::Exhaustive)
    } else {
        let indices = sampling::sample_distinct(admissible, budget, seed);
        let chunks: Vec<&[u64]> = indices.chunks(SAMPLE_CHUNK).collect();
        let worst = par::map_reduce(
            exec,
            chunks.len(),
            Worst::empty(),
            |k| {
                let mut tuple = Vec::with_capacity(v + 2);
                let mut used = Vec::with_capacity(v + 2);
                let mut acc = Worst::empty();
                for &index in chunks[k] {
                    decode_tuple(index, n, v, &mut tuple, &mut used);
                    acc.record(&tuple, space.d(tuple[0], tuple[1]), path_sum(space, &tuple), 1);
                }
                acc
            },
            Worst::merge,
        );
        (
            worst,
            CheckMode::Sampled {
                samples: indices.len() as u64,
                seed,
            },
        )
    };

    let worst_ratio = if worst.ratio == f64::NEG_INFINITY {
        Bound::Finite(0.0)
    } else {
        Bound::from_f64(worst.ratio)
    };
    Ok(AxiomReport {
        v,
        s,
        points: n,
        condition1_ok,
        condition2_ok,
        condition3_ok: worst_ratio.at_most(s),
        worst_ratio,
        witness: worst.witness,
        tuples_checked: worst.checked,
        zero_tuples_skipped: worst.skipped,
        admissible_tuples: admissible,
        mode,
        vacuous: admissible == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalSLabel {
    Exact,
    /// Sampled tuples only: the true minimal s may be larger.
    LowerBound,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalS {
    pub v: usize,
    pub s_min: Bound,
    pub witness: Option<Witness>,
    pub label: MinimalSLabel,
    pub report: AxiomReport,
}

/// Smallest `s >= 1` for which the polygon inequality holds on the checked
/// tuples.
pub fn minimal_s(space: &FiniteSpace, v: usize, budget: u64, seed: u64) -> Result<MinimalS, SpaceError> {
    minimal_s_with(space, v, budget, seed, Execution::default())
}

pub fn minimal_s_with(
    space: &FiniteSpace,
    v: usize,
    budget: u64,
    seed: u64,
    exec: Execution,
) -> Result<MinimalS, SpaceError> {
    let report = check_axioms_with(space, v, 1.0, budget, seed, exec)?;
    let s_min = match report.worst_ratio {
        Bound::Finite(r) => Bound::Finite(r.max(1.0)),
        Bound::Unbounded => Bound::Unbounded,
    };
    let label = if report.vacuous {
        MinimalSLabel::Vacuous
    } else if report.mode == CheckMode::Exhaustive {
        MinimalSLabel::Exact
    } else {
        MinimalSLabel::LowerBound
    };
    Ok(MinimalS {
        v,
        s_min,
        witness: report.witness.clone(),
        label,
        report,
    })
}

/// Named space classes implied by a `(v, s_min)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassFlags {
    pub metric: bool,
    pub b_metric: bool,
    pub rectangular: bool,
    pub rectangular_b_metric: bool,
    pub v_generalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub v: usize,
    pub s_min: Bound,
    pub label: MinimalSLabel,
    pub flags: ClassFlags,
    /// `None` when no finite `s` works (a zero off-diagonal distance).
    pub signature: Option<SpaceSignature>,
}

/// One classification per `v` in `v_grid`.
pub fn classify_space(
    space: &FiniteSpace,
    v_grid: &[usize],
    budget: u64,
    seed: u64,
) -> Result<Vec<Classification>, SpaceError> {
    v_grid
        .iter()
        .map(|&v| {
            let ms = minimal_s(space, v, budget, seed)?;
            let axioms_12 = ms.report.condition1_ok && ms.report.condition2_ok;
            let finite = axioms_12 && !ms.s_min.is_unbounded();
            let unit = finite && ms.s_min.at_most(1.0);
            let flags = ClassFlags {
                metric: v == 1 && unit,
                b_metric: v == 1 && finite,
                rectangular: v == 2 && unit,
                rectangular_b_metric: v == 2 && finite,
                v_generalized: unit,
            };
            let signature = ms.s_min.value().filter(|_| axioms_12).map(|s| SpaceSignature {
                v,
                s,
                complete: false,
                axiom_status: if ms.report.vacuous {
                    AxiomStatus::Vacuous
                } else {
                    match ms.report.mode {
                        CheckMode::Exhaustive => AxiomStatus::VerifiedExhaustive,
                        CheckMode::Sampled { samples, seed } => {
                            AxiomStatus::VerifiedSampled { samples, seed }
                        }
                    }
                },
            });
            Ok(Classification {
                v,
                s_min: ms.s_min,
                label: ms.label,
                flags,
                signature,
            })
        })
        .collect()
}
