//! Command dispatch. Exit codes: 0 for a feasible or passing verdict, 1 for a
//! computed infeasible or failing verdict, 2 for usage and input errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use classchan_core::channel::{capacity_with_cap, from_labeled_confusion_matrix, DEFAULT_MAX_ITERATIONS};
use classchan_core::rademacher::exact_rademacher_with_cap;
use classchan_core::simulator::{end_to_end_with, evolve_with};
use classchan_core::{
    binary_entropy, bsc, capacity_bsc, equivocation, error_budget, mc_rademacher,
    min_repetition, mutual_information, phi_map, rep_block_error, theorem1_check,
    theorem2_verdict, CodeSpec, CriterionInstance, DiscreteChannel, Error as CoreError,
    HypothesisClass, ProbabilityDistribution, RateMapping, Strictness, TerminalStatus,
};
use serde::Serialize;

use crate::io::{self, parse_code, Scenario};
use crate::parallel::Parallel;
use crate::report::{
    labeled, BudgetJson, CodeJson, CriterionJson, EndToEndJson, Envelope, LabeledProb,
    RademacherJson, Theorem1Json, TraceJson,
};
use crate::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "classchan", version, about = "Classifier-as-channel audits, criteria, code design and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Channel capacity of a BSC or of a confusion-matrix channel.
    Capacity(CapacityArgs),
    /// Evaluate conditions A/B and both theorems for one operating point.
    Criterion(CriterionArgs),
    /// Tolerable equivocation and BSC error for a given source entropy.
    Budget(BudgetArgs),
    /// Empirical Rademacher complexity of a hypothesis-class CSV.
    Rademacher(RademacherArgs),
    /// Smallest repetition code reaching a target block error.
    CodeDesign(CodeDesignArgs),
    /// Budget check, code design and Monte Carlo run for one scenario.
    Simulate(SimulateArgs),
    /// Retrain-until-reliable evolution loop.
    Evolve(EvolveArgs),
    /// Audit a classifier from its confusion matrix.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// BSC crossover probability.
    #[arg(long, conflicts_with = "confusion", required_unless_present = "confusion")]
    pub p: Option<f64>,
    /// Confusion-matrix CSV.
    #[arg(long)]
    pub confusion: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    /// Shannon rate R; defaults to the mapped complexity.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Complexity already mapped to a rate.
    #[arg(long, conflicts_with = "complexity", required_unless_present = "complexity")]
    pub phi: Option<f64>,
    /// Rademacher complexity, mapped through the rate mapping.
    #[arg(long)]
    pub complexity: Option<f64>,
    /// Interior anchors `c:r,c:r` for a piecewise-linear mapping.
    #[arg(long)]
    pub phi_table: Option<String>,
    /// Minimum equivocation in bits.
    #[arg(long, conflicts_with = "p", required_unless_present = "p")]
    pub min_hy: Option<f64>,
    /// BSC crossover; the equivocation is h(p).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub max_entropy: f64,
    /// Accept equivocation equal to half the source entropy.
    #[arg(long)]
    pub non_strict: bool,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 1.0)]
    pub max_entropy: f64,
}

#[derive(Debug, Args)]
pub struct RademacherArgs {
    #[arg(long)]
    pub hypotheses: PathBuf,
    #[arg(long, value_parser = ["exact", "mc"], default_value = "exact")]
    pub method: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest sample size enumerated exactly.
    #[arg(long, default_value_t = classchan_core::rademacher::DEFAULT_EXACT_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub phi_table: Option<String>,
}

#[derive(Debug, Args)]
pub struct CodeDesignArgs {
    /// Crossover probability of the classifier channel.
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub target: f64,
}

#[derive(Debug, Args, Clone)]
pub struct ScenarioArgs {
    /// key = value scenario file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training error of the classifier (alias: --p).
    #[arg(long, alias = "p")]
    pub base_error: Option<f64>,
    /// Application-time flip probability.
    #[arg(long)]
    pub noise: Option<f64>,
    /// none, rep:N or rm:M.
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub non_strict: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Also run the evolution loop and include its trace.
    #[arg(long)]
    pub with_trace: bool,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long)]
    pub retrain_factor: Option<f64>,
    #[arg(long)]
    pub max_rounds: Option<u64>,
    /// Write the per-round trace as CSV.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub confusion: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((stdout, pass)) => Outcome { code: if pass { 0 } else { 1 }, stdout, stderr: String::new() },
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

type Reply = (String, bool);

fn reply<T: Serialize>(command: &'static str, body: T, pass: bool) -> Result<Reply> {
    Ok((Envelope::new(command, body).to_json(), pass))
}

fn dispatch(command: Command) -> Result<Reply> {
    match command {
        Command::Capacity(a) => capacity(a),
        Command::Criterion(a) => criterion(a),
        Command::Budget(a) => budget(a),
        Command::Rademacher(a) => rademacher(a),
        Command::CodeDesign(a) => code_design(a),
        Command::Simulate(a) => simulate(a),
        Command::Evolve(a) => evolve(a),
        Command::Audit(a) => audit(a),
    }
}

fn parse_phi_table(text: Option<&str>) -> Result<RateMapping> {
    let Some(text) = text else {
        return Ok(RateMapping::Linear);
    };
    let anchors = text
        .split(',')
        .map(|pair| {
            let (c, r) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("--phi-table entry {pair:?} is not c:r")))?;
            let parse = |v: &str| {
                v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--phi-table value {v:?} is not a number")))
            };
            Ok((parse(c)?, parse(r)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateMapping::table(anchors)?)
}

fn load_confusion_channel(path: &std::path::Path) -> Result<DiscreteChannel> {
    let cm = io::parse_confusion_csv(path)?;
    Ok(from_labeled_confusion_matrix(cm.true_labels, cm.predicted_labels, &cm.counts)?)
}

#[derive(Serialize)]
struct CapacityReport {
    source: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    capacity_bits: f64,
    upper_bound_bits: f64,
    closed_form_bits: Option<f64>,
    optimal_input: Vec<LabeledProb>,
    iterations: usize,
}

fn capacity(a: CapacityArgs) -> Result<Reply> {
    let (channel, source, closed_form) = match (a.p, &a.confusion) {
        (Some(p), _) => (bsc(p)?, format!("bsc:{p}"), Some(capacity_bsc(p)?)),
        (None, Some(path)) => (load_confusion_channel(path)?, path.display().to_string(), None),
        (None, None) => return Err(CliError::Usage("capacity needs --p or --confusion".into())),
    };
    let c = capacity_with_cap(&channel, a.tol, DEFAULT_MAX_ITERATIONS)?;
    let pass = c.capacity > 0.0;
    reply(
        "capacity",
        CapacityReport {
            source,
            inputs: channel.input_labels().to_vec(),
            outputs: channel.output_labels().to_vec(),
            capacity_bits: c.capacity,
            upper_bound_bits: c.upper_bound,
            closed_form_bits: closed_form,
            optimal_input: labeled(c.optimal_input.labels(), c.optimal_input.probs()),
            iterations: c.iterations,
        },
        pass,
    )
}

#[derive(Serialize)]
struct CriterionCommandReport {
    rate: f64,
    phi_of_rf: f64,
    max_entropy: f64,
    min_hy: f64,
    strict: bool,
    #[serde(flatten)]
    report: CriterionJson,
    theorem1: Theorem1Json,
}

fn criterion(a: CriterionArgs) -> Result<Reply> {
    let phi = match (a.phi, a.complexity) {
        (Some(phi), _) => phi,
        (None, Some(c)) => phi_map(c, &parse_phi_table(a.phi_table.as_deref())?)?,
        (None, None) => return Err(CliError::Usage("criterion needs --phi or --complexity".into())),
    };
    let min_hy = match (a.min_hy, a.p) {
        (Some(h), _) => h,
        (None, Some(p)) => binary_entropy(p)?,
        (None, None) => return Err(CliError::Usage("criterion needs --min-hy or --p".into())),
    };
    let strictness = if a.non_strict { Strictness::NonStrict } else { Strictness::Strict };
    let inst = CriterionInstance::new(a.rate.unwrap_or(phi), phi, a.max_entropy, min_hy)?
        .with_strictness(strictness);
    let report = theorem2_verdict(&inst);
    let pass = report.passes();
    reply(
        "criterion",
        CriterionCommandReport {
            rate: inst.rate,
            phi_of_rf: inst.phi_of_rf,
            max_entropy: inst.max_h,
            min_hy: inst.min_hy,
            strict: !a.non_strict,
            report: (&report).into(),
            theorem1: theorem1_check(&inst).into(),
        },
        pass,
    )
}

#[derive(Serialize)]
struct BudgetReport {
    max_entropy: f64,
    #[serde(flatten)]
    budget: BudgetJson,
}

fn budget(a: BudgetArgs) -> Result<Reply> {
    let b = error_budget(a.max_entropy)?;
    reply("budget", BudgetReport { max_entropy: a.max_entropy, budget: b.into() }, true)
}

fn rademacher(a: RademacherArgs) -> Result<Reply> {
    let hyps = io::parse_hypotheses_csv(&a.hypotheses)?;
    let class = HypothesisClass::new(&hyps)?;
    let mapping = parse_phi_table(a.phi_table.as_deref())?;
    let (est, seed) = match a.method.as_str() {
        "mc" => {
            let seed = a
                .seed
                .ok_or_else(|| CliError::Usage("--method mc needs an explicit --seed".into()))?;
            (mc_rademacher(&class, a.trials, seed)?, Some(seed))
        }
        _ => match exact_rademacher_with_cap(&class, a.cap) {
            Err(e @ CoreError::TooLarge { .. }) => return Err(CliError::Usage(e.to_string())),
            other => (other?, None),
        },
    };
    let phi_rate = phi_map(est.value.clamp(0.0, 1.0), &mapping)?;
    reply(
        "rademacher",
        RademacherJson::new(&est, class.sample_size(), class.len(), seed, phi_rate),
        true,
    )
}

#[derive(Serialize)]
struct CodeDesignReport {
    p: f64,
    target: f64,
    feasible: bool,
    code: Option<CodeJson>,
    analytic_block_error: Option<f64>,
    capacity_bits: f64,
    reason: Option<String>,
}

fn code_design(a: CodeDesignArgs) -> Result<Reply> {
    let capacity_bits = capacity_bsc(a.p)?;
    let (code, err, reason) = match min_repetition(a.p, a.target) {
        Ok(c) => (Some(c), Some(rep_block_error(c, a.p)?), None),
        Err(CoreError::Infeasible(why)) => (None, None, Some(why)),
        Err(e) => return Err(e.into()),
    };
    let feasible = code.is_some();
    reply(
        "code-design",
        CodeDesignReport {
            p: a.p,
            target: a.target,
            feasible,
            code: code.map(|c| CodeSpec::Repetition(c).into()),
            analytic_block_error: err,
            capacity_bits,
            reason,
        },
        feasible,
    )
}

fn scenario_from(args: &ScenarioArgs) -> Result<Scenario> {
    let file = match &args.config {
        Some(path) => io::parse_scenario_file(path)?,
        None => Scenario::default(),
    };
    let code = args
        .code
        .as_deref()
        .map(parse_code)
        .transpose()
        .map_err(|m| CliError::Usage(format!("--code: {m}")))?;
    Ok(file.merged(Scenario {
        base_error: args.base_error,
        noise_error: args.noise,
        code,
        trials: args.trials,
        seed: args.seed,
        target_error: args.target,
        epsilon: args.epsilon,
        strict: args.non_strict.then_some(false),
        ..Default::default()
    }))
}

fn simulate(a: SimulateArgs) -> Result<Reply> {
    let config = scenario_from(&a.scenario)?.into_config(CodeSpec::Uncoded)?;
    let report = end_to_end_with(&Parallel, &config, a.with_trace)?;
    let pass = report.feasible;
    reply("simulate", EndToEndJson::new(&report, config.target_error, config.seed), pass)
}

#[derive(Serialize)]
struct EvolveReport {
    base_error: f64,
    noise_error: f64,
    code: CodeJson,
    target_error: f64,
    retrain_factor: f64,
    max_rounds: u64,
    seed: u64,
    #[serde(flatten)]
    trace: TraceJson,
}

fn evolve(a: EvolveArgs) -> Result<Reply> {
    let mut scenario = scenario_from(&a.scenario)?;
    scenario.retrain_factor = a.retrain_factor.or(scenario.retrain_factor);
    scenario.max_rounds = a.max_rounds.or(scenario.max_rounds);
    let config = scenario.into_config(CodeSpec::Uncoded)?;
    let trace = evolve_with(&Parallel, &config)?;
    if let Some(path) = &a.trace_out {
        std::fs::write(path, io::trace_csv(&trace))
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    let pass = trace.terminal_status == TerminalStatus::Converged;
    reply(
        "evolve",
        EvolveReport {
            base_error: config.model.base_error(),
            noise_error: config.model.noise_error(),
            code: config.code.into(),
            target_error: config.target_error,
            retrain_factor: config.retrain_factor,
            max_rounds: config.max_rounds,
            seed: config.seed,
            trace: (&trace).into(),
        },
        pass,
    )
}

#[derive(Serialize)]
struct AuditReport {
    source: String,
    true_labels: Vec<String>,
    predicted_labels: Vec<String>,
    transition: Vec<Vec<f64>>,
    /// Misclassification rate with uniform class priors (square matrices).
    error_rate: Option<f64>,
    source_entropy_bits: f64,
    equivocation_bits: f64,
    mutual_information_bits: f64,
    normalized_equivocation: f64,
    capacity_bits: f64,
    optimal_input: Vec<LabeledProb>,
    epsilon: f64,
    budget: BudgetJson,
    criterion: CriterionJson,
}

fn audit(a: AuditArgs) -> Result<Reply> {
    let channel = load_confusion_channel(&a.confusion)?;
    let k = channel.num_inputs();
    if k < 2 {
        return Err(CliError::Usage("audit needs at least two true classes".into()));
    }
    let uniform = ProbabilityDistribution::new(channel.input_labels().to_vec(), vec![1.0 / k as f64; k])?;
    let hy = equivocation(&channel, &uniform)?;
    let max_h = (k as f64).log2();
    let normalized = (hy / max_h).min(1.0);
    let inst = CriterionInstance::at_operating_point(a.epsilon, normalized)?;
    let report = theorem2_verdict(&inst);
    let cap = capacity_with_cap(&channel, a.tol, DEFAULT_MAX_ITERATIONS)?;
    let error_rate = (channel.num_outputs() == k)
        .then(|| 1.0 - (0..k).map(|i| channel.row(i)[i]).sum::<f64>() / k as f64);
    let pass = report.passes();
    reply(
        "audit",
        AuditReport {
            source: a.confusion.display().to_string(),
            true_labels: channel.input_labels().to_vec(),
            predicted_labels: channel.output_labels().to_vec(),
            transition: channel.rows().map(<[f64]>::to_vec).collect(),
            error_rate,
            source_entropy_bits: max_h,
            equivocation_bits: hy,
            mutual_information_bits: mutual_information(&channel, &uniform)?,
            normalized_equivocation: normalized,
            capacity_bits: cap.capacity,
            optimal_input: labeled(cap.optimal_input.labels(), cap.optimal_input.probs()),
            epsilon: a.epsilon,
            budget: error_budget(1.0)?.into(),
            criterion: (&report).into(),
        },
        pass,
    )
}
