//! Shared fixtures for the benchmarks.

use cubefpp::fpp::{WeightModel, WeightScheme};
use cubefpp::hypercube::Dimension;

pub const BENCH_SEED: u64 = 0xbe4c;

/// Weight models for `count` consecutive seeds.
pub fn models(n: u32, count: u64, scheme: WeightScheme) -> Vec<WeightModel> {
    let d = Dimension::new(n).expect("bench dimension in range");
    (0..count).map(|i| WeightModel::new(BENCH_SEED + i, d, scheme).expect("model fits")).collect()
}
