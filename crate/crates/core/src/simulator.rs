//! Seeded Monte Carlo transmission through a classifier channel and the
//! retrain-until-reliable evolution loop.
//!
//! Randomness is counter-based (see [`crate::rng`]): trial `t` of round `r`
//! under seed `s` always sees the same stream, so error counts are identical
//! whether trials run serially, in chunks, or on many threads.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use crate::channel::{bsc, capacity_bsc, effective_error, ClassifierChannelModel, DiscreteChannel};
use crate::coding::{min_repetition, CodeSpec};
use crate::criteria::{
    error_budget, theorem2_verdict, CriterionInstance, CriterionReport, ErrorBudget, Strictness,
};
use crate::entropy::binary_entropy_unchecked;
use crate::error::{Error, Result};
use crate::rng::TrialRng;

/// Validated pairing of a channel and a code, ready to run trials.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    channel: DiscreteChannel,
    code: CodeSpec,
}

impl TrialPlan {
    pub fn new(channel: DiscreteChannel, code: CodeSpec) -> Result<Self> {
        let binary = channel.is_binary();
        match code {
            CodeSpec::Uncoded if channel.num_inputs() != channel.num_outputs() => {
                Err(Error::Configuration(alloc::format!(
                    "uncoded transmission needs a square channel, got {}x{}",
                    channel.num_inputs(),
                    channel.num_outputs()
                )))
            }
            CodeSpec::Repetition(_) | CodeSpec::ReedMuller(_) if !binary => {
                Err(Error::Configuration(alloc::format!(
                    "binary codes need a 2x2 channel, got {}x{}",
                    channel.num_inputs(),
                    channel.num_outputs()
                )))
            }
            _ => Ok(Self { channel, code }),
        }
    }

    pub fn channel(&self) -> &DiscreteChannel {
        &self.channel
    }

    pub fn code(&self) -> CodeSpec {
        self.code
    }

    /// Number of trials in `trials` whose decoded message differs from the
    /// sent one.
    pub fn count_errors(&self, seed: u64, round: u64, trials: Range<u64>) -> u64 {
        let rng = TrialRng::new(seed, round);
        let k = self.code.message_length();
        let mut message = alloc::vec![false; k];
        let mut received = alloc::vec![false; self.code.block_length()];
        let mut errors = 0;
        for t in trials {
            let mut stream = rng.trial(t);
            let failed = if !self.channel.is_binary() {
                let n = self.channel.num_inputs();
                let x = ((stream.uniform() * n as f64) as usize).min(n - 1);
                stream.categorical(self.channel.row(x)) != x
            } else {
                let bits = stream.next_u64();
                for (i, b) in message.iter_mut().enumerate() {
                    *b = bits >> i & 1 == 1;
                }
                let codeword = self.code.encode(&message).expect("message length matches code");
                for (r, &sent) in received.iter_mut().zip(&codeword) {
                    let flip = self.channel.row(usize::from(sent))[usize::from(!sent)];
                    *r = sent ^ stream.bernoulli(flip);
                }
                self.code.decode(&received).expect("block length matches code") != message
            };
            errors += u64::from(failed);
        }
        errors
    }
}

/// Strategy for evaluating a batch of trials.
pub trait Executor {
    fn count_errors(&self, plan: &TrialPlan, seed: u64, round: u64, trials: u64) -> u64;
}

/// Runs every trial on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn count_errors(&self, plan: &TrialPlan, seed: u64, round: u64, trials: u64) -> u64 {
        plan.count_errors(seed, round, 0..trials)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitResult {
    pub block_error_rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / trials)`.
    pub std_error: f64,
    pub errors: u64,
    pub trials: u64,
}

impl TransmitResult {
    fn from_counts(errors: u64, trials: u64) -> Self {
        let rate = errors as f64 / trials as f64;
        Self {
            block_error_rate: rate,
            std_error: libm::sqrt(rate * (1.0 - rate) / trials as f64),
            errors,
            trials,
        }
    }
}

/// Monte Carlo block error rate of `code` over `channel` (serial, round 0).
pub fn transmit_mc(
    channel: &DiscreteChannel,
    code: CodeSpec,
    trials: u64,
    seed: u64,
) -> Result<TransmitResult> {
    transmit_mc_with(&Serial, channel, code, trials, seed, 0)
}

pub fn transmit_mc_with(
    executor: &impl Executor,
    channel: &DiscreteChannel,
    code: CodeSpec,
    trials: u64,
    seed: u64,
    round: u64,
) -> Result<TransmitResult> {
    if trials == 0 {
        return Err(Error::Domain { name: "trials", value: 0.0, range: "[1, inf)" });
    }
    let plan = TrialPlan::new(channel.clone(), code)?;
    let errors = executor.count_errors(&plan, seed, round, trials);
    Ok(TransmitResult::from_counts(errors, trials))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub model: ClassifierChannelModel,
    pub code: CodeSpec,
    pub trials: u64,
    pub seed: u64,
    pub target_error: f64,
    /// Multiplier applied to the training error after each failed round.
    pub retrain_factor: f64,
    pub max_rounds: u64,
    /// Operating point `R = φ{R(F)} = epsilon` for the half criterion.
    pub epsilon: f64,
    pub strictness: Strictness,
}

impl SimulationConfig {
    pub fn new(model: ClassifierChannelModel, code: CodeSpec, trials: u64, seed: u64) -> Self {
        Self {
            model,
            code,
            trials,
            seed,
            target_error: 1e-3,
            retrain_factor: 0.8,
            max_rounds: 20,
            epsilon: 0.5,
            strictness: Strictness::Strict,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain { name: "trials", value: 0.0, range: "[1, inf)" });
        }
        if !(self.target_error > 0.0 && self.target_error < 1.0) {
            return Err(Error::Domain { name: "target_error", value: self.target_error, range: "(0, 1)" });
        }
        if !(self.retrain_factor > 0.0 && self.retrain_factor < 1.0) {
            return Err(Error::Domain {
                name: "retrain_factor",
                value: self.retrain_factor,
                range: "(0, 1)",
            });
        }
        if self.max_rounds == 0 {
            return Err(Error::Domain { name: "max_rounds", value: 0.0, range: "[1, inf)" });
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(Error::Domain { name: "epsilon", value: self.epsilon, range: "(0, 0.5]" });
        }
        Ok(())
    }

    fn criterion(&self, p: f64) -> Result<CriterionReport> {
        let inst = CriterionInstance::at_operating_point(self.epsilon, binary_entropy_unchecked(p))?
            .with_strictness(self.strictness);
        Ok(theorem2_verdict(&inst))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub base_error: f64,
    /// Crossover of the composed channel this round.
    pub effective_error: f64,
    pub criterion: CriterionReport,
    pub measured_error: f64,
    pub std_error: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Converged,
    Exhausted,
}

impl TerminalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalStatus::Converged => "converged",
            TerminalStatus::Exhausted => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub rounds: Vec<RoundRecord>,
    pub terminal_status: TerminalStatus,
}

/// Retraining loop: each round measures the coded error; while it exceeds
/// the target the training error becomes `base_error * retrain_factor^t`.
/// Application noise stays fixed.
pub fn evolve(config: &SimulationConfig) -> Result<EvolutionTrace> {
    evolve_with(&Serial, config)
}

pub fn evolve_with(executor: &impl Executor, config: &SimulationConfig) -> Result<EvolutionTrace> {
    config.validate()?;
    let p0 = config.model.base_error();
    let mut rounds = Vec::new();
    for round in 0..config.max_rounds {
        // Closed form rather than repeated multiplication: no drift.
        let base_error = p0 * libm::pow(config.retrain_factor, round as f64);
        let model = config.model.with_base_error(base_error)?;
        let p = effective_error(&model);
        let plan = TrialPlan::new(bsc(p)?, config.code)?;
        let errors = executor.count_errors(&plan, config.seed, round, config.trials);
        let measured = TransmitResult::from_counts(errors, config.trials);
        rounds.push(RoundRecord {
            round,
            base_error,
            effective_error: p,
            criterion: config.criterion(p)?,
            measured_error: measured.block_error_rate,
            std_error: measured.std_error,
            trials: config.trials,
        });
        if measured.block_error_rate <= config.target_error {
            return Ok(EvolutionTrace { rounds, terminal_status: TerminalStatus::Converged });
        }
    }
    Ok(EvolutionTrace { rounds, terminal_status: TerminalStatus::Exhausted })
}

/// Everything known about one operating point: budget, half criterion,
/// code design, analytic and empirical error.
#[derive(Debug, Clone, PartialEq)]
pub struct EndToEndReport {
    pub effective_error: f64,
    /// `h(p)` for uniform labels.
    pub equivocation: f64,
    pub capacity: f64,
    pub budget: ErrorBudget,
    pub criterion: CriterionReport,
    /// `None` when no code can reach the target.
    pub code: Option<CodeSpec>,
    pub design_note: Option<String>,
    pub analytic_error: Option<f64>,
    pub empirical: Option<TransmitResult>,
    pub trace: Option<EvolutionTrace>,
    /// Criterion passes and the simulated error meets the target.
    pub feasible: bool,
}

pub fn end_to_end(config: &SimulationConfig, with_trace: bool) -> Result<EndToEndReport> {
    end_to_end_with(&Serial, config, with_trace)
}

pub fn end_to_end_with(
    executor: &impl Executor,
    config: &SimulationConfig,
    with_trace: bool,
) -> Result<EndToEndReport> {
    config.validate()?;
    let p = effective_error(&config.model);
    let criterion = config.criterion(p)?;
    let (code, design_note) = match config.code {
        CodeSpec::Uncoded => match min_repetition(p, config.target_error) {
            Ok(c) => (Some(CodeSpec::Repetition(c)), None),
            Err(Error::Infeasible(why)) => (None, Some(why)),
            Err(e) => return Err(e),
        },
        given => (Some(given), None),
    };
    let analytic_error = match code {
        Some(c) => c.analytic_block_error(p)?,
        None => None,
    };
    let empirical = match code {
        Some(c) => Some(transmit_mc_with(executor, &bsc(p)?, c, config.trials, config.seed, 0)?),
        None => None,
    };
    let trace = if with_trace { Some(evolve_with(executor, config)?) } else { None };
    let feasible = criterion.passes()
        && empirical.is_some_and(|e| e.block_error_rate <= config.target_error);
    Ok(EndToEndReport {
        effective_error: p,
        equivocation: binary_entropy_unchecked(p),
        capacity: capacity_bsc(p)?,
        budget: error_budget(1.0)?,
        criterion,
        code,
        design_note,
        analytic_error,
        empirical,
        trace,
        feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{ReedMullerCode, RepetitionCode};
    use crate::criteria::Verdict;
    use crate::entropy::inverse_binary_entropy;
    use alloc::vec;

    fn rep(n: u64) -> CodeSpec {
        CodeSpec::Repetition(RepetitionCode::new(n).unwrap())
    }

    fn within(result: &TransmitResult, expected: f64, k: f64) -> bool {
        let se = libm::sqrt(expected * (1.0 - expected) / result.trials as f64);
        (result.block_error_rate - expected).abs() <= k * se
    }

    #[test]
    fn noiseless_channels_never_fail() {
        let id = DiscreteChannel::identity(2);
        for code in [CodeSpec::Uncoded, rep(5), CodeSpec::ReedMuller(ReedMullerCode::new(3).unwrap())] {
            let r = transmit_mc(&id, code, 10_000, 1).unwrap();
            assert_eq!(r.errors, 0);
            assert_eq!(r.std_error, 0.0);
        }
        let r = transmit_mc(&DiscreteChannel::identity(4), CodeSpec::Uncoded, 10_000, 1).unwrap();
        assert_eq!(r.errors, 0);
    }

    #[test]
    fn raw_and_coded_error_match_analytic() {
        let ch = bsc(0.1).unwrap();
        let raw = transmit_mc(&ch, CodeSpec::Uncoded, 200_000, 3).unwrap();
        assert!(within(&raw, 0.1, 3.0), "{raw:?}");
        let coded = transmit_mc(&ch, rep(3), 200_000, 3).unwrap();
        assert!(within(&coded, 0.028, 3.0), "{coded:?}");
    }

    #[test]
    fn asymmetric_and_multiclass_channels() {
        // Z-channel: only input 1 is ever flipped, so uncoded error = 0.5 * 0.4.
        let z = DiscreteChannel::from_rows(vec![vec![1.0, 0.0], vec![0.4, 0.6]]).unwrap();
        let r = transmit_mc(&z, CodeSpec::Uncoded, 100_000, 9).unwrap();
        assert!(within(&r, 0.2, 4.0), "{r:?}");
        let three = DiscreteChannel::from_rows(vec![
            vec![0.8, 0.1, 0.1],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.3, 0.7],
        ])
        .unwrap();
        let r = transmit_mc(&three, CodeSpec::Uncoded, 100_000, 9).unwrap();
        assert!(within(&r, (0.2 + 0.0 + 0.3) / 3.0, 4.0), "{r:?}");
    }

    #[test]
    fn configuration_errors() {
        let three = DiscreteChannel::identity(3);
        assert!(matches!(transmit_mc(&three, rep(3), 10, 1), Err(Error::Configuration(_))));
        let wide = DiscreteChannel::from_rows(vec![vec![0.5, 0.5, 0.0]; 2]).unwrap();
        assert!(matches!(transmit_mc(&wide, CodeSpec::Uncoded, 10, 1), Err(Error::Configuration(_))));
        assert!(transmit_mc(&bsc(0.1).unwrap(), CodeSpec::Uncoded, 0, 1).is_err());
    }

    #[test]
    fn split_ranges_sum_to_whole() {
        let plan = TrialPlan::new(bsc(0.2).unwrap(), rep(5)).unwrap();
        let whole = plan.count_errors(17, 2, 0..30_000);
        let parts: u64 = [0..7_000, 7_000..7_001, 7_001..30_000]
            .into_iter()
            .map(|r| plan.count_errors(17, 2, r))
            .sum();
        assert_eq!(whole, parts);
    }

    #[test]
    fn evolve_examples() {
        let zero = SimulationConfig::new(ClassifierChannelModel::new(0.0, 0.0).unwrap(), rep(9), 10_000, 1);
        let trace = evolve(&zero).unwrap();
        assert_eq!(trace.terminal_status, TerminalStatus::Converged);
        assert_eq!(trace.rounds.len(), 1);
        assert_eq!(trace.rounds[0].measured_error, 0.0);

        let mut cfg = SimulationConfig::new(ClassifierChannelModel::new(0.3, 0.0).unwrap(), rep(9), 200_000, 5);
        cfg.retrain_factor = 0.8;
        cfg.target_error = 1e-3;
        let trace = evolve(&cfg).unwrap();
        assert_eq!(trace.terminal_status, TerminalStatus::Converged);
        assert_eq!(trace.rounds.last().unwrap().round, 5);
        for w in trace.rounds.windows(2) {
            assert!(w[1].effective_error < w[0].effective_error);
        }
        let threshold = inverse_binary_entropy(0.5).unwrap();
        for r in &trace.rounds {
            assert!((r.effective_error - 0.3 * 0.8f64.powi(r.round as i32)).abs() < 1e-12);
            assert_eq!(r.criterion.passes(), r.effective_error < threshold, "round {}", r.round);
        }

        let mut slow = SimulationConfig::new(ClassifierChannelModel::new(0.45, 0.0).unwrap(), rep(9), 10_000, 1);
        slow.retrain_factor = 0.999;
        slow.max_rounds = 3;
        let trace = evolve(&slow).unwrap();
        assert_eq!(trace.terminal_status, TerminalStatus::Exhausted);
        assert_eq!(trace.rounds.len(), 3);
    }

    #[test]
    fn evolve_keeps_noise_fixed() {
        let mut cfg = SimulationConfig::new(ClassifierChannelModel::new(0.2, 0.05).unwrap(), rep(3), 1_000, 1);
        cfg.max_rounds = 4;
        cfg.target_error = 1e-9;
        let trace = evolve(&cfg).unwrap();
        for r in &trace.rounds {
            let m = ClassifierChannelModel::new(r.base_error, 0.05).unwrap();
            assert_eq!(r.effective_error, effective_error(&m));
        }
        assert_eq!(trace, evolve(&cfg).unwrap());
    }

    #[test]
    fn config_validation() {
        let base = SimulationConfig::new(ClassifierChannelModel::new(0.1, 0.0).unwrap(), rep(3), 10, 1);
        for bad in [
            SimulationConfig { trials: 0, ..base },
            SimulationConfig { target_error: 0.0, ..base },
            SimulationConfig { retrain_factor: 1.0, ..base },
            SimulationConfig { max_rounds: 0, ..base },
            SimulationConfig { epsilon: 0.7, ..base },
        ] {
            assert!(evolve(&bad).is_err());
        }
    }

    #[test]
    fn end_to_end_examples() {
        let mut cfg = SimulationConfig::new(ClassifierChannelModel::new(0.1, 0.0).unwrap(), CodeSpec::Uncoded, 200_000, 8);
        cfg.target_error = 1e-3;
        let r = end_to_end(&cfg, false).unwrap();
        assert!(r.criterion.passes());
        assert_eq!(r.code, Some(rep(9)));
        assert!((r.analytic_error.unwrap() - 8.9092e-4).abs() < 1e-12);
        assert!(r.empirical.unwrap().block_error_rate <= 1e-3);
        assert!(r.feasible);
        assert!(r.trace.is_none());

        cfg.model = ClassifierChannelModel::new(0.12, 0.0).unwrap();
        let r = end_to_end(&cfg, false).unwrap();
        assert!(!r.criterion.passes());
        assert_eq!(r.criterion.theorem2_verdict, Verdict::NotApplicable);
        assert!(!r.feasible);

        cfg.model = ClassifierChannelModel::new(0.5, 0.0).unwrap();
        let r = end_to_end(&cfg, true).unwrap();
        assert_eq!(r.capacity, 0.0);
        assert_eq!(r.code, None);
        assert!(r.design_note.is_some());
        assert!(r.empirical.is_none());
        assert!(!r.feasible);
        assert!(r.trace.is_some());
    }
}
