//! Shannon entropy and the quantities built from it, all in bits.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::channel::DiscreteChannel;
use crate::error::{check_unit, Error, Result};
use crate::PROB_SUM_TOL;

/// Bisection tolerance for [`inverse_binary_entropy`].
pub const INVERSE_TOL: f64 = 1e-9;

/// Finite probability vector over a labeled alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    /// Validates without normalizing: entries must be non-negative and sum to
    /// one within [`PROB_SUM_TOL`].
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("distribution has no symbols".into()));
        }
        if labels.len() != probs.len() {
            return Err(Error::Format(alloc::format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Validation(alloc::format!("duplicate label {l:?}")));
            }
        }
        validate_probability_row(&probs, "distribution")?;
        Ok(Self { labels, probs })
    }

    /// Distribution with labels `"0"`, `"1"`, ...
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Self::new(default_labels(probs.len()), probs)
    }

    /// Explicit normalization of non-negative weights.
    pub fn normalized(labels: Vec<String>, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || !(total > 0.0) {
            return Err(Error::Validation(
                "weights must be finite, non-negative and not all zero".into(),
            ));
        }
        Self::new(labels, weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("distribution has no symbols".into()));
        }
        Self::from_probs(alloc::vec![1.0 / n as f64; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

pub(crate) fn validate_probability_row(row: &[f64], what: &str) -> Result<()> {
    if let Some(bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::Validation(alloc::format!("{what} has entry {bad} < 0 or non-finite")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::Validation(alloc::format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

/// `-p log2 p` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn surprisal_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * libm::log2(p)
    }
}

/// Entropy of a raw probability slice; callers guarantee validity.
pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| surprisal_term(p)).sum::<f64>().max(0.0)
}

/// Shannon entropy `H(X) = -Σ p log2 p`.
pub fn entropy(dist: &ProbabilityDistribution) -> f64 {
    let h = entropy_of(&dist.probs);
    // Rounding can nudge the uniform case a hair above log2|alphabet|.
    h.min(libm::log2(dist.len() as f64))
}

/// Binary entropy `h(p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(binary_entropy_unchecked(p))
}

pub(crate) fn binary_entropy_unchecked(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    // Evaluate on the lower half so both branches share one code path.
    let q = if p > 0.5 { 1.0 - p } else { p };
    if q == 0.5 {
        return 1.0;
    }
    surprisal_term(q) + surprisal_term(1.0 - q)
}

/// The unique `p` in `[0, 1/2]` with `h(p) = target`, by bisection.
pub fn inverse_binary_entropy(target: f64) -> Result<f64> {
    check_unit("target", target)?;
    if target == 0.0 {
        return Ok(0.0);
    }
    if target == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > INVERSE_TOL * 1e-3 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy_unchecked(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_dims(channel: &DiscreteChannel, input: &ProbabilityDistribution) -> Result<()> {
    if channel.num_inputs() != input.len() {
        return Err(Error::Validation(alloc::format!(
            "input distribution has {} symbols, channel expects {}",
            input.len(),
            channel.num_inputs()
        )));
    }
    Ok(())
}

/// Equivocation `H(X|Y)` of the channel input given its output.
pub fn equivocation(channel: &DiscreteChannel, input: &ProbabilityDistribution) -> Result<f64> {
    check_dims(channel, input)?;
    Ok(equivocation_of(channel, input.probs()))
}

pub(crate) fn equivocation_of(channel: &DiscreteChannel, px: &[f64]) -> f64 {
    let py = channel.output_marginal(px);
    let mut h = 0.0;
    for (x, row) in channel.rows().enumerate() {
        for (y, &w) in row.iter().enumerate() {
            let joint = px[x] * w;
            if joint > 0.0 && py[y] > 0.0 {
                h -= joint * libm::log2(joint / py[y]);
            }
        }
    }
    h.max(0.0)
}

/// Mutual information `I(X;Y) = H(X) - H(X|Y)`.
pub fn mutual_information(
    channel: &DiscreteChannel,
    input: &ProbabilityDistribution,
) -> Result<f64> {
    check_dims(channel, input)?;
    Ok(mutual_information_of(channel, input.probs()))
}

pub(crate) fn mutual_information_of(channel: &DiscreteChannel, px: &[f64]) -> f64 {
    (entropy_of(px) - equivocation_of(channel, px)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bsc, DiscreteChannel};
    use alloc::vec;
    use proptest::prelude::*;

    /// Oracle: H(X|Y) summed straight from the joint table, in natural logs,
    /// converted at the end.
    #[allow(clippy::needless_range_loop)]
    fn joint_table_equivocation(w: &[Vec<f64>], px: &[f64]) -> f64 {
        let ny = w[0].len();
        let mut total = 0.0;
        for y in 0..ny {
            let py: f64 = (0..px.len()).map(|x| px[x] * w[x][y]).sum();
            for x in 0..px.len() {
                let j = px[x] * w[x][y];
                if j > 0.0 {
                    total += j * (py / j).ln();
                }
            }
        }
        total / core::f64::consts::LN_2
    }

    fn dist(p: &[f64]) -> ProbabilityDistribution {
        ProbabilityDistribution::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&dist(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy(&dist(&[1.0, 0.0])), 0.0);
        assert!((entropy(&dist(&[0.1, 0.9])) - 0.468_995_593_589_281_2).abs() < 1e-12);
    }

    #[test]
    fn invalid_distributions() {
        assert!(matches!(
            ProbabilityDistribution::from_probs(vec![-0.1, 1.1]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ProbabilityDistribution::from_probs(vec![0.5, 0.4]),
            Err(Error::Validation(_))
        ));
        assert!(ProbabilityDistribution::from_probs(vec![]).is_err());
        assert!(ProbabilityDistribution::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
        let n = ProbabilityDistribution::normalized(default_labels(2), &[3.0, 1.0]).unwrap();
        assert_eq!(n.probs(), &[0.75, 0.25]);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.11).unwrap() - 0.499_915_958_164_528).abs() < 1e-12);
        assert!(matches!(binary_entropy(1.5), Err(Error::Domain { .. })));
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn inverse_binary_entropy_examples() {
        assert_eq!(inverse_binary_entropy(1.0).unwrap(), 0.5);
        assert_eq!(inverse_binary_entropy(0.0).unwrap(), 0.0);
        let p = inverse_binary_entropy(0.5).unwrap();
        // 40-digit bisection reference: 0.11002786443835955...
        assert!((p - 0.110_027_864_438_359_55).abs() < 1e-9);
        assert!(inverse_binary_entropy(1.01).is_err());
    }

    #[test]
    fn equivocation_and_information_examples() {
        let u = dist(&[0.5, 0.5]);
        let noiseless = DiscreteChannel::identity(2);
        assert_eq!(equivocation(&noiseless, &u).unwrap(), 0.0);
        assert!((mutual_information(&noiseless, &u).unwrap() - 1.0).abs() < 1e-15);

        let half = bsc(0.5).unwrap();
        assert!((equivocation(&half, &u).unwrap() - 1.0).abs() < 1e-15);
        assert!(mutual_information(&half, &u).unwrap().abs() < 1e-15);

        let ch = bsc(0.1).unwrap();
        let hy = equivocation(&ch, &u).unwrap();
        let oracle = joint_table_equivocation(&[vec![0.9, 0.1], vec![0.1, 0.9]], &[0.5, 0.5]);
        assert!((hy - oracle).abs() < 1e-12);
        assert!((hy - 0.468_995_59).abs() < 1e-5);
        assert!((mutual_information(&ch, &u).unwrap() - 0.531_004_41).abs() < 1e-5);

        let three = dist(&[0.2, 0.3, 0.5]);
        assert!(matches!(equivocation(&ch, &three), Err(Error::Validation(_))));
        assert!(mutual_information(&ch, &three).is_err());
    }

    fn random_row(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, len).prop_filter_map("zero row", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| w.iter().map(|x| x / s).collect())
        })
    }

    fn random_channel_and_input() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
        (1usize..5, 1usize..5).prop_flat_map(|(nx, ny)| {
            (proptest::collection::vec(random_row(ny), nx), random_row(nx))
        })
    }

    proptest! {
        #[test]
        fn entropy_is_permutation_invariant(p in random_row(5), rot in 0usize..5) {
            let mut q = p.clone();
            q.rotate_left(rot);
            let (a, b) = (entropy_of(&p), entropy_of(&q));
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn entropy_bounded_by_log_alphabet(p in random_row(6)) {
            if let Ok(d) = ProbabilityDistribution::from_probs(p) {
                let h = entropy(&d);
                prop_assert!(h >= 0.0 && h <= libm::log2(6.0));
            }
        }

        #[test]
        fn binary_entropy_symmetric_and_monotone(p in 0.0f64..=0.5, d in 1e-6f64..0.01) {
            let h = binary_entropy(p).unwrap();
            prop_assert!((h - binary_entropy(1.0 - p).unwrap()).abs() < 1e-15);
            if p + d <= 0.5 {
                prop_assert!(binary_entropy(p + d).unwrap() > h);
            }
        }

        #[test]
        fn inverse_round_trips(p in 0.0f64..=0.5) {
            let back = inverse_binary_entropy(binary_entropy(p).unwrap()).unwrap();
            prop_assert!((back - p).abs() < 1e-8, "p={} back={}", p, back);
        }

        #[test]
        fn information_identities((w, px) in random_channel_and_input()) {
            let ch = DiscreteChannel::from_rows(w.clone()).unwrap();
            let input = ProbabilityDistribution::from_probs(px.clone());
            prop_assume!(input.is_ok());
            let input = input.unwrap();
            let hx = entropy(&input);
            let hxy = equivocation(&ch, &input).unwrap();
            let mi = mutual_information(&ch, &input).unwrap();
            prop_assert!(mi >= -1e-12);
            prop_assert!(hxy <= hx + 1e-12);
            prop_assert!((mi - (hx - hxy)).abs() < 1e-9);
            prop_assert!(mi <= hx.min(libm::log2(w[0].len() as f64)) + 1e-9);
            prop_assert!((hxy - joint_table_equivocation(&w, &px)).abs() < 1e-9);
        }
    }
}
