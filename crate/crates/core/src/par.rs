//! Execution-mode switch for the data-parallel loops.
//!
//! With the `parallel` feature the [`Execution::Parallel`] mode runs on the
//! rayon global pool; without it, both modes run sequentially. Reductions are
//! always combined in index order, so the two modes agree bit for bit as long
//! as the combine function is associative.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Map every index in `0..n` and fold the results left to right with `combine`.
pub(crate) fn map_reduce<T, M, C>(exec: Execution, n: usize, identity: T, map: M, combine: C) -> T
where
    T: Send + Sync + Clone,
    M: Fn(usize) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n)
            .into_par_iter()
            .map(map)
            .reduce(|| identity.clone(), combine),
        _ => (0..n).map(map).fold(identity, combine),
    }
}

/// Order-preserving parallel map.
pub(crate) fn map_collect<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}
