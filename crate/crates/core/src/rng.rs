//! Counter-based randomness for Monte Carlo trials.
//!
//! Every trial draws from its own ChaCha8 stream: the key is built from
//! `(seed, round)` and the stream id is the trial index. A trial's draws are
//! therefore a pure function of `(seed, round, trial)`, independent of how
//! trials are scheduled or split across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Generator for one `(seed, round)` pair; hand out per-trial streams with
/// [`TrialRng::trial`].
#[derive(Clone, Debug)]
pub struct TrialRng {
    key: [u8; 32],
}

impl TrialRng {
    pub fn new(seed: u64, round: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&round.to_le_bytes());
        // Domain tag so these keys never collide with other ChaCha users.
        key[16..24].copy_from_slice(b"clschan1");
        Self { key }
    }

    pub fn trial(&self, index: u64) -> TrialStream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        TrialStream { rng }
    }
}

pub struct TrialStream {
    rng: ChaCha8Rng,
}

impl TrialStream {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Index drawn from a discrete distribution by inverse CDF.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding slack above the cumulative sum.
        probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }
}
