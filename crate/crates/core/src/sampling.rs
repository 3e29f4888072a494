//! Seeded uniform sampling without replacement over large index spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw `amount` distinct indices uniformly from `0..count`, returned sorted.
///
/// Dense requests shuffle the full range; sparse requests draw with
/// replacement and top up after deduplication, which terminates quickly
/// because each round collides with probability below one half.
pub fn sample_distinct(count: u64, amount: u64, seed: u64) -> Vec<u64> {
    let amount = amount.min(count);
    let mut rng = rng(seed);
    if amount == count {
        return (0..count).collect();
    }
    let mut out: Vec<u64>;
    if amount.saturating_mul(2) >= count {
        let picked = rand::seq::index::sample(&mut rng, count as usize, amount as usize);
        out = picked.into_iter().map(|i| i as u64).collect();
        out.sort_unstable();
    } else {
        out = Vec::with_capacity(amount as usize);
        while (out.len() as u64) < amount {
            let missing = amount - out.len() as u64;
            out.extend((0..missing).map(|_| rng.gen_range(0..count)));
            out.sort_unstable();
            out.dedup();
        }
    }
    out
}
