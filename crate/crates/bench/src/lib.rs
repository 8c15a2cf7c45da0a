//! Fixtures shared by the benchmarks.

use capkm_core::{gen_random, CapacityMode, CostMode, Instance};

/// k-median instance with capacities in `1..=2⌈n/k⌉`.
pub fn kmedian(n: usize, m: usize, k: usize, seed: u64) -> Instance {
    let per = n.div_ceil(k) as u64;
    gen_random(n, m, k, CapacityMode::Nonuniform { lo: 1, hi: 2 * per }, CostMode::Zero, seed).expect("valid fixture")
}

/// Uniform-capacity facility location instance with slack of half a share.
pub fn uniform(n: usize, m: usize, k: usize, seed: u64) -> Instance {
    let per = n.div_ceil(k) as u64;
    gen_random(n, m, k, CapacityMode::Uniform(per + per / 2), CostMode::Range { lo: 0, hi: 1 }, seed).expect("valid fixture")
}
