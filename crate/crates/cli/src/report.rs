//! JSON report shapes. Every report carries `schema_version` and `command`.

use classchan_core::{
    CodeSpec, CriterionReport, EndToEndReport, ErrorBudget, EvolutionTrace, Method,
    RademacherEstimate, Theorem1Outcome, TransmitResult,
};
use serde::Serialize;

use crate::io::code_name;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, body: T) -> Self {
        Self { schema_version: SCHEMA_VERSION, command, body }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Serialize)]
pub struct CriterionJson {
    pub condition_a: bool,
    pub condition_b: bool,
    pub shannon_ok: bool,
    pub capacity_bits: f64,
    pub theorem2_applicable: bool,
    pub theorem2_verdict: &'static str,
    pub explanation: String,
}

impl From<&CriterionReport> for CriterionJson {
    fn from(r: &CriterionReport) -> Self {
        Self {
            condition_a: r.condition_a,
            condition_b: r.condition_b,
            shannon_ok: r.shannon_ok,
            capacity_bits: r.capacity,
            theorem2_applicable: r.theorem2_applicable,
            theorem2_verdict: r.theorem2_verdict.as_str(),
            explanation: r.explanation.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Theorem1Json {
    pub applicable: bool,
    pub case_a_condition_b: Option<bool>,
    pub case_b_condition_a: Option<bool>,
    pub holds: Option<bool>,
}

impl From<Theorem1Outcome> for Theorem1Json {
    fn from(t: Theorem1Outcome) -> Self {
        let (case_a, case_b) = match t {
            Theorem1Outcome::NotApplicable => (None, None),
            Theorem1Outcome::Cases { case_a, case_b } => (case_a, case_b),
        };
        Self {
            applicable: t != Theorem1Outcome::NotApplicable,
            case_a_condition_b: case_a,
            case_b_condition_a: case_b,
            holds: t.holds(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BudgetJson {
    pub max_hy_bits: f64,
    pub max_bsc_error: f64,
    /// `max_bsc_error` rounded up to a whole percent.
    pub whole_percent_bound: u32,
}

impl From<ErrorBudget> for BudgetJson {
    fn from(b: ErrorBudget) -> Self {
        Self {
            max_hy_bits: b.max_hy,
            max_bsc_error: b.max_bsc_error,
            whole_percent_bound: (b.max_bsc_error * 100.0).ceil() as u32,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CodeJson {
    pub name: String,
    pub kind: &'static str,
    pub block_length: usize,
    pub message_length: usize,
    pub rate: f64,
}

impl From<CodeSpec> for CodeJson {
    fn from(c: CodeSpec) -> Self {
        let kind = match c {
            CodeSpec::Uncoded => "none",
            CodeSpec::Repetition(_) => "repetition",
            CodeSpec::ReedMuller(_) => "reed_muller",
        };
        Self {
            name: code_name(c),
            kind,
            block_length: c.block_length(),
            message_length: c.message_length(),
            rate: c.message_length() as f64 / c.block_length() as f64,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TransmitJson {
    pub block_error_rate: f64,
    pub stderr: f64,
    pub errors: u64,
    pub trials: u64,
}

impl From<TransmitResult> for TransmitJson {
    fn from(t: TransmitResult) -> Self {
        Self { block_error_rate: t.block_error_rate, stderr: t.std_error, errors: t.errors, trials: t.trials }
    }
}

#[derive(Debug, Serialize)]
pub struct RoundJson {
    pub round: u64,
    pub base_error: f64,
    pub p_t: f64,
    pub criterion_pass: bool,
    pub theorem2_verdict: &'static str,
    pub measured_error: f64,
    pub stderr: f64,
    pub trials: u64,
}

#[derive(Debug, Serialize)]
pub struct TraceJson {
    pub terminal_status: &'static str,
    pub rounds: Vec<RoundJson>,
}

impl From<&EvolutionTrace> for TraceJson {
    fn from(t: &EvolutionTrace) -> Self {
        Self {
            terminal_status: t.terminal_status.as_str(),
            rounds: t
                .rounds
                .iter()
                .map(|r| RoundJson {
                    round: r.round,
                    base_error: r.base_error,
                    p_t: r.effective_error,
                    criterion_pass: r.criterion.passes(),
                    theorem2_verdict: r.criterion.theorem2_verdict.as_str(),
                    measured_error: r.measured_error,
                    stderr: r.std_error,
                    trials: r.trials,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EndToEndJson {
    pub effective_error: f64,
    pub equivocation_bits: f64,
    pub capacity_bits: f64,
    pub budget: BudgetJson,
    pub criterion: CriterionJson,
    pub code: Option<CodeJson>,
    pub design_note: Option<String>,
    pub analytic_block_error: Option<f64>,
    pub empirical: Option<TransmitJson>,
    pub trace: Option<TraceJson>,
    pub feasible: bool,
    pub target_error: f64,
    pub seed: u64,
}

impl EndToEndJson {
    pub fn new(r: &EndToEndReport, target_error: f64, seed: u64) -> Self {
        Self {
            effective_error: r.effective_error,
            equivocation_bits: r.equivocation,
            capacity_bits: r.capacity,
            budget: r.budget.into(),
            criterion: (&r.criterion).into(),
            code: r.code.map(CodeJson::from),
            design_note: r.design_note.clone(),
            analytic_block_error: r.analytic_error,
            empirical: r.empirical.map(TransmitJson::from),
            trace: r.trace.as_ref().map(TraceJson::from),
            feasible: r.feasible,
            target_error,
            seed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RademacherJson {
    pub sample_size: usize,
    pub hypotheses: usize,
    pub value: f64,
    pub std_error: f64,
    pub method: &'static str,
    pub trials: u64,
    pub seed: Option<u64>,
    /// Complexity clamped into `[0, 1]` before mapping to a rate.
    pub phi_rate: f64,
}

impl RademacherJson {
    pub fn new(
        est: &RademacherEstimate,
        sample_size: usize,
        hypotheses: usize,
        seed: Option<u64>,
        phi_rate: f64,
    ) -> Self {
        Self {
            sample_size,
            hypotheses,
            value: est.value,
            std_error: est.std_error,
            method: match est.method {
                Method::Exact => "exact",
                Method::MonteCarlo => "monte_carlo",
            },
            trials: est.trials,
            seed,
            phi_rate,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LabeledProb {
    pub label: String,
    pub prob: f64,
}

pub fn labeled(labels: &[String], probs: &[f64]) -> Vec<LabeledProb> {
    labels.iter().zip(probs).map(|(l, &p)| LabeledProb { label: l.clone(), prob: p }).collect()
}
