//! Information-theoretic toolkit for treating a trained pattern classifier as
//! a discrete noisy channel.
//!
//! The crate is `no_std` (with `alloc`) and purely computational:
//!
//! - [`entropy`]: Shannon entropy, binary entropy and its inverse,
//!   equivocation and mutual information (all in bits).
//! - [`channel`]: discrete memoryless channels, the ERROR + NOISE classifier
//!   model and channel capacity (closed form and alternating maximization).
//! - [`rademacher`]: empirical Rademacher complexity of finite hypothesis
//!   classes and the complexity-to-rate mapping.
//! - [`criteria`]: the half-entropy conditions, the two theorem checkers and
//!   the tolerable-error budget.
//! - [`coding`]: repetition and first-order Reed-Muller codes with analytic
//!   block-error calculators.
//! - [`simulator`]: seeded, counter-based Monte Carlo transmission and the
//!   retrain-until-reliable evolution loop.
//!
//! IO, file formats and the command line live in the `classchan` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod coding;
pub mod criteria;
pub mod entropy;
mod error;
pub mod rademacher;
pub mod rng;
pub mod simulator;

pub use channel::{
    bsc, capacity_bsc, capacity_general, effective_error, from_confusion_matrix, Capacity,
    ClassifierChannelModel, DiscreteChannel,
};
pub use coding::{
    min_repetition, rep_block_error, rep_decode, rep_encode, rm_decode, rm_encode, CodeSpec,
    ReedMullerCode, RepetitionCode,
};
pub use criteria::{
    condition_a, condition_b, error_budget, shannon_admissible, theorem1_check, theorem2_verdict,
    CriterionInstance, CriterionReport, ErrorBudget, Strictness, Theorem1Outcome, Verdict,
};
pub use entropy::{
    binary_entropy, entropy, equivocation, inverse_binary_entropy, mutual_information,
    ProbabilityDistribution,
};
pub use error::{Error, Result};
pub use rademacher::{
    exact_rademacher, mc_rademacher, phi_map, HypothesisClass, Method, RademacherEstimate,
    RateMapping,
};
pub use simulator::{
    end_to_end, evolve, transmit_mc, EndToEndReport, EvolutionTrace, RoundRecord,
    SimulationConfig, TerminalStatus, TransmitResult,
};

/// Tolerance on probability sums (distributions and channel rows).
pub const PROB_SUM_TOL: f64 = 1e-12;
