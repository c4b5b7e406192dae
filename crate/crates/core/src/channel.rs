//! Discrete memoryless channels and their capacity.
//!
//! A trained classifier is modelled as a channel whose input is the true class
//! and whose output is the predicted class. [`ClassifierChannelModel`] captures
//! the two-stage picture of a training error followed by application noise,
//! both acting as symmetric label flips.

use alloc::string::String;
use alloc::vec::Vec;

use crate::entropy::{
    binary_entropy_unchecked, default_labels, validate_probability_row,
    ProbabilityDistribution,
};
use crate::error::{check_unit, Error, Result};

/// Default iteration cap for [`capacity_general`].
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

/// Row-stochastic transition matrix `P(y | x)`, rows indexed by input.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    transition: Vec<f64>,
}

impl DiscreteChannel {
    pub fn new(
        input_labels: Vec<String>,
        output_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if rows.is_empty() || output_labels.is_empty() {
            return Err(Error::Validation("channel needs at least one input and one output".into()));
        }
        if rows.len() != input_labels.len() {
            return Err(Error::Format(alloc::format!(
                "{} rows for {} input labels",
                rows.len(),
                input_labels.len()
            )));
        }
        let width = output_labels.len();
        let mut transition = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Format(alloc::format!(
                    "row {i} has {} entries, expected {width}",
                    row.len()
                )));
            }
            validate_probability_row(row, "channel row")?;
            transition.extend_from_slice(row);
        }
        Ok(Self { input_labels, output_labels, transition })
    }

    /// Channel with numeric labels on both sides.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, Vec::len);
        Self::new(default_labels(nx), default_labels(ny), rows)
    }

    /// Noiseless channel on `n` symbols.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(rows).expect("identity rows are stochastic")
    }

    pub fn num_inputs(&self) -> usize {
        self.input_labels.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_labels.len()
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let w = self.num_outputs();
        &self.transition[x * w..(x + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.transition.chunks_exact(self.num_outputs())
    }

    pub fn is_binary(&self) -> bool {
        self.num_inputs() == 2 && self.num_outputs() == 2
    }

    /// `P(y) = Σ_x P(x) P(y|x)`.
    pub fn output_marginal(&self, px: &[f64]) -> Vec<f64> {
        let mut py = alloc::vec![0.0; self.num_outputs()];
        for (row, &p) in self.rows().zip(px) {
            for (acc, &w) in py.iter_mut().zip(row) {
                *acc += p * w;
            }
        }
        py
    }
}

/// Training error (ERROR) and application nuisance (NOISE) as flip
/// probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierChannelModel {
    base_error: f64,
    noise_error: f64,
}

impl ClassifierChannelModel {
    pub fn new(base_error: f64, noise_error: f64) -> Result<Self> {
        check_unit("base_error", base_error)?;
        check_unit("noise_error", noise_error)?;
        Ok(Self { base_error, noise_error })
    }

    pub fn base_error(&self) -> f64 {
        self.base_error
    }

    pub fn noise_error(&self) -> f64 {
        self.noise_error
    }

    pub fn with_base_error(self, base_error: f64) -> Result<Self> {
        Self::new(base_error, self.noise_error)
    }

    /// The composed binary symmetric channel.
    pub fn channel(&self) -> DiscreteChannel {
        bsc(effective_error(self)).expect("effective error lies in [0, 1]")
    }
}

/// Binary symmetric channel with crossover probability `p`.
pub fn bsc(p: f64) -> Result<DiscreteChannel> {
    check_unit("p", p)?;
    DiscreteChannel::from_rows(alloc::vec![alloc::vec![1.0 - p, p], alloc::vec![p, 1.0 - p]])
}

/// Crossover probability of two independent symmetric flips in series:
/// `p(1 - q) + (1 - p)q`.
pub fn effective_error(model: &ClassifierChannelModel) -> f64 {
    let (p, q) = (model.base_error, model.noise_error);
    (p * (1.0 - q) + (1.0 - p) * q).clamp(0.0, 1.0)
}

/// Row-normalizes a matrix of counts (rows = true class, columns = predicted).
pub fn from_confusion_matrix(counts: &[Vec<u64>]) -> Result<DiscreteChannel> {
    let nx = counts.len();
    let ny = counts.first().map_or(0, Vec::len);
    from_labeled_confusion_matrix(default_labels(nx), default_labels(ny), counts)
}

pub fn from_labeled_confusion_matrix(
    true_labels: Vec<String>,
    predicted_labels: Vec<String>,
    counts: &[Vec<u64>],
) -> Result<DiscreteChannel> {
    if counts.is_empty() {
        return Err(Error::Format("confusion matrix has no rows".into()));
    }
    let width = counts[0].len();
    let mut rows = Vec::with_capacity(counts.len());
    for (i, row) in counts.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Format(alloc::format!(
                "row {i} has {} cells, expected {width}",
                row.len()
            )));
        }
        let total: u64 = row.iter().sum();
        if total == 0 {
            return Err(Error::Validation(alloc::format!("row {i} has no observations")));
        }
        rows.push(row.iter().map(|&c| c as f64 / total as f64).collect());
    }
    DiscreteChannel::new(true_labels, predicted_labels, rows)
}

/// Closed-form BSC capacity `1 - h(p)`.
pub fn capacity_bsc(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(1.0 - binary_entropy_unchecked(p))
}

/// Capacity with the maximizing input distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    /// Mutual information achieved by `optimal_input`.
    pub capacity: f64,
    pub optimal_input: ProbabilityDistribution,
    /// Upper bound `max_x D(W(.|x) || q)`; the true capacity lies in
    /// `[capacity, upper_bound]`.
    pub upper_bound: f64,
    pub iterations: usize,
}

/// Channel capacity by Blahut-Arimoto alternating maximization with the
/// default iteration cap.
pub fn capacity_general(channel: &DiscreteChannel, tol: f64) -> Result<Capacity> {
    capacity_with_cap(channel, tol, DEFAULT_MAX_ITERATIONS)
}

/// Relative weight below which an input is treated as outside the support.
const SUPPORT_FLOOR: f64 = 1e-9;
/// Blahut-Arimoto steps between Newton polishing attempts.
const POLISH_EVERY: usize = 20;
const LOG2_E: f64 = core::f64::consts::LOG2_E;

/// `D_x = D(W(.|x) || q)` for the output marginal `q` of `r`; returns `q`.
fn divergences(channel: &DiscreteChannel, r: &[f64], d: &mut [f64]) -> Vec<f64> {
    let q = channel.output_marginal(r);
    for (dx, row) in d.iter_mut().zip(channel.rows()) {
        *dx = row
            .iter()
            .zip(&q)
            .filter(|(&w, _)| w > 0.0)
            .map(|(&w, &qy)| w * libm::log2(w / qy))
            .sum();
    }
    q
}

/// `(I(r), max_x D_x)`; the pair brackets the capacity.
fn info_and_upper(channel: &DiscreteChannel, r: &[f64], d: &mut [f64]) -> (f64, f64) {
    divergences(channel, r, d);
    let info = r.iter().zip(d.iter()).map(|(a, b)| a * b).sum::<f64>();
    let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (info, upper.max(info))
}

/// Dense solve with partial pivoting; `None` when numerically singular.
fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let tail: f64 = (col + 1..n).map(|k| a[col * n + k] * b[k]).sum();
        b[col] = (b[col] - tail) / a[col * n + col];
    }
    Some(())
}

/// Equality-constrained Newton ascent of `I(r)` on the current support,
/// dropping any input a step would drive negative.
fn newton_on_support(channel: &DiscreteChannel, r: &mut [f64]) -> Option<()> {
    let peak = r.iter().copied().fold(0.0, f64::max);
    let mut support: Vec<usize> = (0..r.len()).filter(|&x| r[x] > SUPPORT_FLOOR * peak).collect();
    for (x, rx) in r.iter_mut().enumerate() {
        if !support.contains(&x) {
            *rx = 0.0;
        }
    }
    let mut d = alloc::vec![0.0; r.len()];
    for _ in 0..100 {
        let k = support.len();
        let q = divergences(channel, r, &mut d);
        let dim = k + 1;
        let mut kkt = alloc::vec![0.0; dim * dim];
        let mut rhs = alloc::vec![0.0; dim];
        for (i, &a) in support.iter().enumerate() {
            let wa = channel.row(a);
            for (j, &b) in support.iter().enumerate().skip(i) {
                let wb = channel.row(b);
                let h: f64 = wa
                    .iter()
                    .zip(wb)
                    .zip(&q)
                    .filter(|(_, &qy)| qy > 0.0)
                    .map(|((x, y), qy)| x * y / qy)
                    .sum();
                let h = -h * LOG2_E - if i == j { 1e-12 } else { 0.0 };
                kkt[i * dim + j] = h;
                kkt[j * dim + i] = h;
            }
            kkt[i * dim + k] = 1.0;
            kkt[k * dim + i] = 1.0;
            rhs[i] = -(d[a] - LOG2_E);
        }
        solve_in_place(&mut kkt, &mut rhs, dim)?;
        let step = &rhs[..k];
        // Ratio test against the non-negativity constraints.
        let blocking = support
            .iter()
            .zip(step)
            .enumerate()
            .filter(|(_, (_, &s))| s < 0.0)
            .map(|(i, (&x, &s))| (i, -r[x] / s))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match blocking {
            Some((i, t)) if t < 1.0 => {
                for (&x, &s) in support.iter().zip(step) {
                    r[x] = (r[x] + t * s).max(0.0);
                }
                r[support.remove(i)] = 0.0;
                if support.is_empty() {
                    return None;
                }
            }
            _ => {
                for (&x, &s) in support.iter().zip(step) {
                    r[x] += s;
                }
                if step.iter().all(|s| s.abs() < 1e-15) {
                    break;
                }
            }
        }
        let total: f64 = r.iter().sum();
        r.iter_mut().for_each(|v| *v /= total);
    }
    Some(())
}

/// Active-set polish: Newton on the support, re-admitting the most promising
/// excluded input while one still beats the current information.
fn polish(channel: &DiscreteChannel, r: &[f64], tol: f64) -> Option<Vec<f64>> {
    let mut r = r.to_vec();
    let mut d = alloc::vec![0.0; r.len()];
    for _ in 0..=r.len() {
        newton_on_support(channel, &mut r)?;
        let (info, _) = info_and_upper(channel, &r, &mut d);
        let readmit = (0..r.len())
            .filter(|&x| r[x] == 0.0 && d[x] > info + tol)
            .max_by(|&a, &b| d[a].total_cmp(&d[b]));
        match readmit {
            Some(x) => {
                r.iter_mut().for_each(|v| *v *= 0.999);
                r[x] = 0.001;
            }
            None => break,
        }
    }
    Some(r)
}

/// Capacity by Blahut-Arimoto alternating maximization from the uniform
/// input, with periodic Newton polishing on the active inputs.
///
/// For any input `r` with output marginal `q`, `I(r) <= C <= max_x D(W(.|x) || q)`.
/// Iteration stops once that certified gap is at most `tol`.
pub fn capacity_with_cap(
    channel: &DiscreteChannel,
    tol: f64,
    max_iterations: usize,
) -> Result<Capacity> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain { name: "tol", value: tol, range: "(0, inf)" });
    }
    let nx = channel.num_inputs();
    let mut r = alloc::vec![1.0 / nx as f64; nx];
    let mut d = alloc::vec![0.0; nx];
    let (mut info, mut upper) = (0.0, f64::INFINITY);
    let finish = |r: &[f64], info: f64, upper: f64, iterations| -> Result<Capacity> {
        let capacity = info.max(0.0);
        Ok(Capacity {
            capacity,
            optimal_input: ProbabilityDistribution::normalized(channel.input_labels().to_vec(), r)?,
            upper_bound: upper.max(capacity),
            iterations,
        })
    };
    for iteration in 0..=max_iterations {
        (info, upper) = info_and_upper(channel, &r, &mut d);
        if upper - info <= tol {
            return finish(&r, info, upper, iteration);
        }
        if iteration == max_iterations {
            break;
        }
        if iteration % POLISH_EVERY == POLISH_EVERY - 1 {
            if let Some(candidate) = polish(channel, &r, tol) {
                let mut dc = alloc::vec![0.0; nx];
                let (ci, cu) = info_and_upper(channel, &candidate, &mut dc);
                if cu - ci <= tol {
                    return finish(&candidate, ci, cu, iteration);
                }
                if ci > info {
                    r = candidate;
                    continue;
                }
            }
        }
        // Shift by the max exponent to keep 2^D finite.
        let shift = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for (ri, di) in r.iter_mut().zip(&d) {
            *ri *= libm::exp2(di - shift);
            z += *ri;
        }
        r.iter_mut().for_each(|v| *v /= z);
    }
    Err(Error::NonConvergence { iterations: max_iterations, best_estimate: info.max(0.0), gap: upper - info })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{entropy, mutual_information};
    use alloc::vec;
    use proptest::prelude::*;

    /// Oracle: maximize I(X;Y) over a fine grid of binary inputs.
    fn grid_capacity_binary_input(ch: &DiscreteChannel) -> f64 {
        (0..=20_000)
            .map(|i| {
                let a = i as f64 / 20_000.0;
                let d = ProbabilityDistribution::from_probs(vec![a, 1.0 - a]).unwrap();
                mutual_information(ch, &d).unwrap()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn bsc_examples() {
        assert_eq!(bsc(0.0).unwrap(), DiscreteChannel::identity(2));
        assert!(bsc(0.5).unwrap().rows().flatten().all(|&w| w == 0.5));
        let c = bsc(0.1).unwrap();
        assert_eq!(c.row(0), &[0.9, 0.1]);
        assert_eq!(c.row(1), &[0.1, 0.9]);
        assert!(matches!(bsc(1.2), Err(Error::Domain { .. })));
    }

    #[test]
    fn effective_error_examples() {
        let m = |p, q| effective_error(&ClassifierChannelModel::new(p, q).unwrap());
        assert_eq!(m(0.1, 0.0), 0.1);
        assert_eq!(m(0.0, 0.0), 0.0);
        assert!((m(0.1, 0.05) - 0.14).abs() < 1e-15);
        assert_eq!(m(1.0, 1.0), 0.0);
        assert!(ClassifierChannelModel::new(0.1, -0.2).is_err());
    }

    #[test]
    fn confusion_matrix_examples() {
        let ch = from_confusion_matrix(&[vec![90, 10], vec![10, 90]]).unwrap();
        assert_eq!(ch, bsc(0.1).unwrap());
        assert_eq!(from_confusion_matrix(&[vec![1, 0], vec![0, 1]]).unwrap(), DiscreteChannel::identity(2));
        assert_eq!(from_confusion_matrix(&[vec![50, 50], vec![50, 50]]).unwrap(), bsc(0.5).unwrap());
        assert!(matches!(
            from_confusion_matrix(&[vec![0, 0], vec![1, 2]]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(from_confusion_matrix(&[vec![1, 2], vec![3]]), Err(Error::Format(_))));
        assert!(from_confusion_matrix(&[vec![1, 1, 1], vec![7, 3, 1]]).is_ok());
    }

    #[test]
    fn capacity_bsc_examples() {
        assert_eq!(capacity_bsc(0.0).unwrap(), 1.0);
        assert_eq!(capacity_bsc(0.5).unwrap(), 0.0);
        assert!((capacity_bsc(0.1).unwrap() - 0.531_004_406_410_718_8).abs() < 1e-12);
        assert!(capacity_bsc(2.0).is_err());
    }

    #[test]
    fn capacity_general_examples() {
        let c = capacity_general(&bsc(0.1).unwrap(), 1e-9).unwrap();
        assert!((c.capacity - 0.531_004_41).abs() < 1e-6);
        assert!((c.optimal_input.probs()[0] - 0.5).abs() < 1e-6);

        let c = capacity_general(&DiscreteChannel::identity(4), 1e-9).unwrap();
        assert!((c.capacity - 2.0).abs() < 1e-12);

        let same = DiscreteChannel::from_rows(vec![vec![0.2, 0.8]; 3]).unwrap();
        assert!(capacity_general(&same, 1e-9).unwrap().capacity.abs() < 1e-12);

        assert!(capacity_general(&same, 0.0).is_err());
    }

    #[test]
    fn capacity_general_asymmetric_matches_grid_oracle() {
        // Z-channel: capacity is attained away from the uniform input.
        let z = DiscreteChannel::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let c = capacity_general(&z, 1e-10).unwrap();
        let oracle = grid_capacity_binary_input(&z);
        assert!((c.capacity - oracle).abs() < 1e-6, "{} vs {oracle}", c.capacity);
        // log2(5/4) closed form for the p = 1/2 Z-channel.
        assert!((c.capacity - libm::log2(1.25)).abs() < 1e-8);
        assert!((c.optimal_input.probs()[1] - 0.4).abs() < 1e-4);
    }

    #[test]
    fn capacity_general_drops_useless_inputs() {
        // The third input only adds confusion; plain alternating maximization
        // shrinks its weight sublinearly.
        let ch = DiscreteChannel::from_rows(vec![
            vec![0.9, 0.1],
            vec![0.1, 0.9],
            vec![0.5, 0.5],
        ])
        .unwrap();
        let c = capacity_general(&ch, 1e-12).unwrap();
        assert!((c.capacity - capacity_bsc(0.1).unwrap()).abs() < 1e-12);
        assert!(c.optimal_input.probs()[2] < 1e-9);
        assert!(c.iterations < DEFAULT_MAX_ITERATIONS);
    }

    #[test]
    fn capacity_general_reports_non_convergence() {
        let z = DiscreteChannel::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        match capacity_with_cap(&z, 1e-15, 2) {
            Err(Error::NonConvergence { iterations, best_estimate, .. }) => {
                assert_eq!(iterations, 2);
                assert!(best_estimate > 0.3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn capacity_general_agrees_with_closed_form_on_bsc_grid() {
        let mut p = 0.01;
        while p < 0.495 {
            let general = capacity_general(&bsc(p).unwrap(), 1e-9).unwrap().capacity;
            assert!((general - capacity_bsc(p).unwrap()).abs() < 1e-6, "p={p}");
            p += 0.04;
        }
    }

    fn stochastic_rows(nx: usize, ny: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(
            proptest::collection::vec(0.01f64..1.0, ny).prop_map(|w| {
                let s: f64 = w.iter().sum();
                w.iter().map(|x| x / s).collect::<Vec<_>>()
            }),
            nx,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn capacity_bounds_and_permutation_invariance(
            rows in (1usize..7, 1usize..7).prop_flat_map(|(a, b)| stochastic_rows(a, b)),
            rot_in in 0usize..7,
            rot_out in 0usize..7,
        ) {
            let nx = rows.len();
            let ny = rows[0].len();
            let ch = DiscreteChannel::from_rows(rows.clone()).unwrap();
            let c = capacity_general(&ch, 1e-10).unwrap();
            prop_assert!(c.capacity >= 0.0);
            let bound = libm::log2(nx.min(ny) as f64);
            prop_assert!(c.capacity <= bound + 1e-9);
            prop_assert!(entropy(&c.optimal_input) <= libm::log2(nx as f64) + 1e-12);

            let mut permuted = rows.clone();
            permuted.rotate_left(rot_in % nx);
            for r in &mut permuted {
                r.rotate_left(rot_out % ny);
            }
            let cp = capacity_general(&DiscreteChannel::from_rows(permuted).unwrap(), 1e-10).unwrap();
            prop_assert!((cp.capacity - c.capacity).abs() < 1e-10);
        }

        #[test]
        fn effective_error_properties(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            let a = effective_error(&ClassifierChannelModel::new(p, q).unwrap());
            let b = effective_error(&ClassifierChannelModel::new(q, p).unwrap());
            prop_assert!((a - b).abs() < 1e-15);
            if p <= 0.5 && q <= 0.5 {
                prop_assert!(a <= 0.5);
            }
            if p > 0.0 && p < 1.0 {
                prop_assert!(a > 0.0);
            }
        }

        #[test]
        fn confusion_scaling_is_invisible(
            counts in proptest::collection::vec(proptest::collection::vec(0u64..1000, 3), 1..4),
            k in 1u64..50,
        ) {
            prop_assume!(counts.iter().all(|r| r.iter().sum::<u64>() > 0));
            let scaled: Vec<Vec<u64>> = counts.iter().map(|r| r.iter().map(|c| c * k).collect()).collect();
            prop_assert_eq!(from_confusion_matrix(&counts).unwrap(), from_confusion_matrix(&scaled).unwrap());
        }
    }
}
