//! `bvfix` models generalized b_v(s) metric spaces, checks their axioms,
//! classifies self-maps as Banach, Kannan or weakly contractive, and runs
//! Picard iteration with checks of the a priori error bounds that hold for
//! those map classes.
//!
//! Finite spaces are matrix-backed ([`FiniteSpace`], points are indices) and
//! real-interval spaces are function-backed ([`RealSpace`], points are `f64`).
//! Most algorithms are generic over the [`Space`] and [`SelfMap`] traits.
//!
//! Data-parallel loops (tuple enumeration, pair scans, multi-start runs) use
//! rayon when the `parallel` feature is enabled (the default) and fall back to
//! plain iterators otherwise. Every reduction is order-preserving, so results
//! are bit-identical in both modes.

pub mod catalog;
pub mod contraction;
pub mod expr;
pub mod instance;
pub mod oracle;
pub mod par;
pub mod sampling;
pub mod solver;
pub mod space;

mod bound;

pub use bound::Bound;
pub use contraction::{ContractionReport, Modulus, PairSource};
pub use instance::{Instance, ParsedInstance};
pub use par::Execution;
pub use solver::{IterationTrace, StoppingCriteria, TraceStatus};
pub use space::{
    AxiomReport, FiniteSpace, MapError, Metric, RealMap, RealSpace, SelfMap, Space,
    SpaceSignature, TableMap,
};

/// Absolute tolerance for distance-zero and identity checks.
pub const EPS_EQ: f64 = 1e-12;

/// Relative tolerance for inequality slack.
pub const EPS_CHECK: f64 = 1e-9;

/// Default tuple / pair budget before switching to seeded sampling.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `a <= b` up to the relative slack [`EPS_CHECK`] (floored at 1).
pub fn leq_rel(a: f64, b: f64) -> bool {
    a <= b + EPS_CHECK * b.abs().max(1.0)
}
