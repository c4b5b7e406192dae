//! Empirical Rademacher complexity of finite hypothesis classes and the
//! mapping from complexity to Shannon rate.
//!
//! Each hypothesis is given by its ±1 values on a fixed sample of `n` points.
//! The estimators compute `E_σ[ sup_f (1/n) Σ σ_i f(X_i) ]` with the signed
//! sum (no absolute value); classes closed under negation behave as if the
//! absolute value were taken.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::TrialRng;

/// Largest sample size enumerated exactly unless a caller raises it.
pub const DEFAULT_EXACT_CAP: usize = 20;
const HARD_EXACT_CAP: usize = 32;

/// Finite set of distinct ±1 vectors of common length `n`.
///
/// Internally a `-1` entry is a set bit, so the correlation with a sign
/// vector is `n - 2 * hamming(sigma, f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisClass {
    n: usize,
    masks: Vec<Vec<u64>>,
}

impl HypothesisClass {
    pub fn new(hypotheses: &[Vec<i8>]) -> Result<Self> {
        let first = hypotheses
            .first()
            .ok_or_else(|| Error::Validation("hypothesis class is empty".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::Validation("sample size must be at least 1".into()));
        }
        let mut masks: Vec<Vec<u64>> = Vec::with_capacity(hypotheses.len());
        for (h, values) in hypotheses.iter().enumerate() {
            if values.len() != n {
                return Err(Error::Format(alloc::format!(
                    "hypothesis {h} has {} values, expected {n}",
                    values.len()
                )));
            }
            let mut mask = alloc::vec![0u64; n.div_ceil(64)];
            for (i, &v) in values.iter().enumerate() {
                match v {
                    1 => {}
                    -1 => mask[i / 64] |= 1 << (i % 64),
                    other => {
                        return Err(Error::Validation(alloc::format!(
                            "hypothesis {h} has value {other} at position {i}; expected +1 or -1"
                        )))
                    }
                }
            }
            if masks.contains(&mask) {
                return Err(Error::Validation(alloc::format!("hypothesis {h} is a duplicate")));
            }
            masks.push(mask);
        }
        Ok(Self { n, masks })
    }

    /// Every sign pattern on `n` points.
    pub fn shattering(n: usize) -> Result<Self> {
        if n == 0 || n > HARD_EXACT_CAP {
            return Err(Error::Domain { name: "n", value: n as f64, range: "[1, 32]" });
        }
        let masks = (0..1u64 << n).map(|m| alloc::vec![m]).collect();
        Ok(Self { n, masks })
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// The ±1 vectors, in insertion order.
    pub fn hypotheses(&self) -> Vec<Vec<i8>> {
        self.masks
            .iter()
            .map(|m| (0..self.n).map(|i| if m[i / 64] >> (i % 64) & 1 == 1 { -1 } else { 1 }).collect())
            .collect()
    }

    /// `n * sup_f (1/n) Σ σ_i f_i` for the sign vector whose set bits mark `-1`.
    fn best_correlation(&self, sigma: &[u64]) -> i64 {
        let min_dist = self
            .masks
            .iter()
            .map(|m| m.iter().zip(sigma).map(|(a, b)| (a ^ b).count_ones()).sum::<u32>())
            .min()
            .expect("class is non-empty");
        self.n as i64 - 2 * i64::from(min_dist)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RademacherEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    /// Sign vectors averaged over (`2^n` for the exact method).
    pub trials: u64,
}

/// Exact average over all `2^n` sign vectors, `n` capped at
/// [`DEFAULT_EXACT_CAP`].
pub fn exact_rademacher(class: &HypothesisClass) -> Result<RademacherEstimate> {
    exact_rademacher_with_cap(class, DEFAULT_EXACT_CAP)
}

pub fn exact_rademacher_with_cap(
    class: &HypothesisClass,
    cap: usize,
) -> Result<RademacherEstimate> {
    let n = class.n;
    if n > cap.min(HARD_EXACT_CAP) {
        return Err(Error::TooLarge { n, cap: cap.min(HARD_EXACT_CAP) });
    }
    let count = 1u64 << n;
    // Integer accumulation keeps the average exact up to the final division.
    let total: i64 = (0..count).map(|sigma| class.best_correlation(&[sigma])).sum();
    Ok(RademacherEstimate {
        value: total as f64 / (n as f64 * count as f64),
        std_error: 0.0,
        method: Method::Exact,
        trials: count,
    })
}

/// Monte Carlo average over `trials` uniform sign vectors. Trial `t` uses the
/// counter-based stream `(seed, 0, t)`.
pub fn mc_rademacher(class: &HypothesisClass, trials: u64, seed: u64) -> Result<RademacherEstimate> {
    if trials == 0 {
        return Err(Error::Domain { name: "trials", value: 0.0, range: "[1, inf)" });
    }
    let n = class.n;
    let words = n.div_ceil(64);
    let tail_mask = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let rng = TrialRng::new(seed, 0);
    let mut sigma = alloc::vec![0u64; words];
    let (mut sum, mut sum_sq) = (0i128, 0i128);
    for t in 0..trials {
        let mut stream = rng.trial(t);
        for w in sigma.iter_mut() {
            *w = stream.next_u64();
        }
        sigma[words - 1] &= tail_mask;
        let c = i128::from(class.best_correlation(&sigma));
        sum += c;
        sum_sq += c * c;
    }
    let nf = n as f64;
    let tf = trials as f64;
    let mean = sum as f64 / tf / nf;
    let std_error = if trials > 1 {
        // Integer sums make the zero-variance case exactly zero.
        let centered = sum_sq * i128::from(trials) - sum * sum;
        let var = centered as f64 / (tf * (tf - 1.0)) / (nf * nf);
        libm::sqrt(var.max(0.0) / tf)
    } else {
        0.0
    };
    Ok(RademacherEstimate { value: mean, std_error, method: Method::MonteCarlo, trials })
}

/// Monotone decreasing map from complexity `[0, 1]` onto rate `[0, 1]`,
/// pinned at `φ(0) = 1` and `φ(1) = 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum RateMapping {
    /// `φ(r) = 1 - r`.
    #[default]
    Linear,
    /// Piecewise-linear through interior anchors `(complexity, rate)`; the
    /// endpoints are added implicitly.
    Table(Vec<(f64, f64)>),
}

impl RateMapping {
    /// Validates a user table, adding the pinned endpoints if absent.
    pub fn table(anchors: Vec<(f64, f64)>) -> Result<Self> {
        let mut points = Vec::with_capacity(anchors.len() + 2);
        if anchors.first().map(|a| a.0) != Some(0.0) {
            points.push((0.0, 1.0));
        }
        points.extend(anchors);
        if points.last().map(|a| a.0) != Some(1.0) {
            points.push((1.0, 0.0));
        }
        if points[0] != (0.0, 1.0) || points[points.len() - 1] != (1.0, 0.0) {
            return Err(Error::Validation("rate mapping must pass through (0, 1) and (1, 0)".into()));
        }
        for w in points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if !(x1 > x0) || !(y1 < y0) {
                return Err(Error::Validation(alloc::format!(
                    "rate mapping not strictly decreasing between ({x0}, {y0}) and ({x1}, {y1})"
                )));
            }
        }
        Ok(RateMapping::Table(points))
    }
}

/// Shannon rate associated with a Rademacher complexity.
pub fn phi_map(complexity: f64, mapping: &RateMapping) -> Result<f64> {
    if !(0.0..=1.0).contains(&complexity) {
        return Err(Error::Domain { name: "complexity", value: complexity, range: "[0, 1]" });
    }
    match mapping {
        RateMapping::Linear => Ok(1.0 - complexity),
        RateMapping::Table(points) => {
            let i = points.partition_point(|&(x, _)| x < complexity);
            if i == 0 {
                return Ok(points[0].1);
            }
            let ((x0, y0), (x1, y1)) = (points[i - 1], points[i]);
            if complexity == x1 {
                return Ok(y1);
            }
            Ok(y0 + (y1 - y0) * (complexity - x0) / (x1 - x0))
        }
    }
}
