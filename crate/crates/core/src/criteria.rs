//! The half-entropy conditions and the two theorem checkers built on them.
//!
//! Notation used throughout:
//!
//! | field       | meaning                                   |
//! |-------------|-------------------------------------------|
//! | `rate`      | Shannon rate `R`                          |
//! | `phi_of_rf` | complexity mapped to a rate, `φ{R(F)}`    |
//! | `max_h`     | maximum source entropy `Max H(x)`         |
//! | `min_hy`    | minimum equivocation `Min Hy(x)`          |
//!
//! Conditions A and B use `≤`. Shannon admissibility (`R < Max H − Min Hy`)
//! and the Theorem 2 pass verdict use strict `<` by default; the latter can be
//! relaxed through [`Strictness`] for boundary exploration.

use alloc::string::String;

use crate::entropy::inverse_binary_entropy;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// `min_hy < max_h / 2` is required for a pass.
    #[default]
    Strict,
    /// `min_hy <= max_h / 2` suffices.
    NonStrict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionInstance {
    pub rate: f64,
    pub phi_of_rf: f64,
    pub max_h: f64,
    pub min_hy: f64,
    /// Operating-point knob; not checked as a separate condition.
    pub epsilon: Option<f64>,
    pub strictness: Strictness,
}

impl CriterionInstance {
    pub fn new(rate: f64, phi_of_rf: f64, max_h: f64, min_hy: f64) -> Result<Self> {
        let finite_non_negative = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Domain { name, value: v, range: "[0, inf)" })
            }
        };
        finite_non_negative("rate", rate)?;
        finite_non_negative("min_hy", min_hy)?;
        if !(0.0..=1.0).contains(&phi_of_rf) {
            return Err(Error::Domain { name: "phi_of_rf", value: phi_of_rf, range: "[0, 1]" });
        }
        if !(max_h.is_finite() && max_h > 0.0) {
            return Err(Error::Domain { name: "max_h", value: max_h, range: "(0, inf)" });
        }
        if min_hy > max_h {
            return Err(Error::Validation(alloc::format!(
                "min_hy = {min_hy} exceeds max_h = {max_h}"
            )));
        }
        Ok(Self { rate, phi_of_rf, max_h, min_hy, epsilon: None, strictness: Strictness::Strict })
    }

    /// Normalized instance (`max_h = 1`) at the operating point
    /// `R = φ{R(F)} = epsilon`.
    pub fn at_operating_point(epsilon: f64, min_hy: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::Domain { name: "epsilon", value: epsilon, range: "(0, 0.5]" });
        }
        let mut inst = Self::new(epsilon, epsilon, 1.0, min_hy)?;
        inst.epsilon = Some(epsilon);
        Ok(inst)
    }

    pub fn with_strictness(mut self, strictness: Strictness) -> Self {
        self.strictness = strictness;
        self
    }

    fn half(&self) -> f64 {
        0.5 * self.max_h
    }
}

/// Condition A: `φ{R(F)} ≤ Max H / 2`.
pub fn condition_a(inst: &CriterionInstance) -> bool {
    inst.phi_of_rf <= inst.half()
}

/// Condition B: `Min Hy ≤ Max H / 2`.
pub fn condition_b(inst: &CriterionInstance) -> bool {
    inst.min_hy <= inst.half()
}

/// `(R < C, C)` with `C = Max H − Min Hy`.
pub fn shannon_admissible(inst: &CriterionInstance) -> (bool, f64) {
    let capacity = inst.max_h - inst.min_hy;
    (inst.rate < capacity, capacity)
}

/// Which branch of the Theorem 1 case analysis applies and whether the
/// condition it implies holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem1Outcome {
    /// `φ{R(F)} + Min Hy < Max H` does not hold; the theorem says nothing.
    NotApplicable,
    /// `case_a` is `Some(condition_b)` when `φ ≥ Min Hy`; `case_b` is
    /// `Some(condition_a)` when `φ ≤ Min Hy`. Both are set on the diagonal.
    Cases { case_a: Option<bool>, case_b: Option<bool> },
}

impl Theorem1Outcome {
    /// `None` when not applicable, otherwise whether every implied condition
    /// holds.
    pub fn holds(&self) -> Option<bool> {
        match *self {
            Theorem1Outcome::NotApplicable => None,
            Theorem1Outcome::Cases { case_a, case_b } => {
                Some(case_a.unwrap_or(true) && case_b.unwrap_or(true))
            }
        }
    }
}

pub fn theorem1_check(inst: &CriterionInstance) -> Theorem1Outcome {
    if !(inst.phi_of_rf + inst.min_hy < inst.max_h) {
        return Theorem1Outcome::NotApplicable;
    }
    let case_a = (inst.phi_of_rf >= inst.min_hy).then(|| condition_b(inst));
    let case_b = (inst.phi_of_rf <= inst.min_hy).then(|| condition_a(inst));
    Theorem1Outcome::Cases { case_a, case_b }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub condition_a: bool,
    pub condition_b: bool,
    pub shannon_ok: bool,
    pub theorem2_applicable: bool,
    pub theorem2_verdict: Verdict,
    pub capacity: f64,
    pub explanation: String,
}

impl CriterionReport {
    /// True only for an applicable, passing half criterion.
    pub fn passes(&self) -> bool {
        self.theorem2_verdict == Verdict::Pass
    }
}

/// Theorem 2: under `φ ≥ Min Hy` and `R ≤ Max H / 2`, the chain
/// `C = Max H − Min Hy > Max H / 2 ≥ R` holds exactly when
/// `Min Hy < Max H / 2`.
pub fn theorem2_verdict(inst: &CriterionInstance) -> CriterionReport {
    let half = inst.half();
    let a = condition_a(inst);
    let b = condition_b(inst);
    let (shannon_ok, capacity) = shannon_admissible(inst);
    let applicable = inst.phi_of_rf >= inst.min_hy && inst.rate <= half;
    let verdict = if !applicable {
        Verdict::NotApplicable
    } else {
        let strict_b = match inst.strictness {
            Strictness::Strict => inst.min_hy < half,
            Strictness::NonStrict => inst.min_hy <= half,
        };
        if strict_b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    };
    let explanation = match verdict {
        Verdict::Pass => alloc::format!(
            "equivocation {:.6} bits is below half of the source entropy ({:.6}); capacity {:.6} exceeds rate {:.6}, so coding can drive the error toward zero",
            inst.min_hy, half, capacity, inst.rate
        ),
        Verdict::Fail => alloc::format!(
            "equivocation {:.6} bits is not below half of the source entropy ({:.6}); the half criterion fails",
            inst.min_hy, half
        ),
        Verdict::NotApplicable if inst.phi_of_rf < inst.min_hy => alloc::format!(
            "equivocation {:.6} bits exceeds the complexity-mapped rate {:.6}; zero error approaching is not possible at this operating point",
            inst.min_hy, inst.phi_of_rf
        ),
        Verdict::NotApplicable => alloc::format!(
            "rate {:.6} exceeds half of the source entropy ({:.6}); the half criterion does not apply",
            inst.rate, half
        ),
    };
    CriterionReport {
        condition_a: a,
        condition_b: b,
        shannon_ok,
        theorem2_applicable: applicable,
        theorem2_verdict: verdict,
        capacity,
        explanation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    /// Largest tolerable equivocation, `max_h / 2` bits.
    pub max_hy: f64,
    /// Largest BSC crossover whose binary entropy stays within `max_hy`.
    pub max_bsc_error: f64,
}

/// Tolerable error for a binary code alphabet. Budgets above one bit admit
/// every crossover up to 1/2.
pub fn error_budget(max_h: f64) -> Result<ErrorBudget> {
    if !(max_h.is_finite() && max_h > 0.0) {
        return Err(Error::Domain { name: "max_h", value: max_h, range: "(0, inf)" });
    }
    let max_hy = 0.5 * max_h;
    let max_bsc_error = inverse_binary_entropy(max_hy.min(1.0))?;
    Ok(ErrorBudget { max_hy, max_bsc_error })
}
