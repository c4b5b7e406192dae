use classchan_core::simulator::{Executor, TrialPlan};
use rayon::prelude::*;

const CHUNK: u64 = 1 << 15;

/// Splits trials into fixed chunks across the rayon pool. Counts equal the
/// serial executor's because each trial's stream depends only on its index.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl Executor for Parallel {
    fn count_errors(&self, plan: &TrialPlan, seed: u64, round: u64, trials: u64) -> u64 {
        let chunks = trials.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                plan.count_errors(seed, round, start..(start + CHUNK).min(trials))
            })
            .sum()
    }
}
