//! Text formats: UTF-8, comma-separated, LF line endings.

use std::fmt::Write as _;
use std::path::Path;

use classchan_core::{
    CodeSpec, ClassifierChannelModel, EvolutionTrace, ReedMullerCode, RepetitionCode,
    SimulationConfig, Strictness,
};

use crate::{CliError, Result};

/// Confusion matrix with its class labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub true_labels: Vec<String>,
    pub predicted_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn input_error(path: &str, line: usize, message: impl Into<String>) -> CliError {
    CliError::Input { path: path.to_string(), line, message: message.into() }
}

fn records(text: &str) -> csv::StringRecordsIntoIter<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .into_records()
}

fn line_of(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map_or(fallback, |p| p.line() as usize)
}

pub fn parse_confusion_csv(path: &Path) -> Result<ConfusionMatrix> {
    parse_confusion_str(&read(path)?, &path.display().to_string())
}

/// First row: a corner cell followed by predicted-class labels. Every other
/// row: a true-class label followed by non-negative integer counts.
pub fn parse_confusion_str(text: &str, origin: &str) -> Result<ConfusionMatrix> {
    let mut rows = records(text);
    let header = match rows.next() {
        Some(r) => r.map_err(|e| input_error(origin, 1, e.to_string()))?,
        None => return Err(input_error(origin, 1, "empty file")),
    };
    let predicted_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if predicted_labels.is_empty() {
        return Err(input_error(origin, 1, "header names no predicted classes"));
    }
    let mut true_labels = Vec::new();
    let mut counts = Vec::new();
    for (i, record) in rows.enumerate() {
        let record = record.map_err(|e| input_error(origin, i + 2, e.to_string()))?;
        let line = line_of(&record, i + 2);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != predicted_labels.len() + 1 {
            return Err(input_error(
                origin,
                line,
                format!("expected {} cells, found {}", predicted_labels.len() + 1, record.len()),
            ));
        }
        true_labels.push(record[0].to_string());
        let row = record
            .iter()
            .skip(1)
            .enumerate()
            .map(|(col, cell)| {
                cell.parse::<u64>().map_err(|_| {
                    input_error(
                        origin,
                        line,
                        format!(
                            "column {} ({:?}): {cell:?} is not a non-negative integer count",
                            col + 2,
                            predicted_labels[col]
                        ),
                    )
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        counts.push(row);
    }
    if counts.is_empty() {
        return Err(input_error(origin, 1, "no count rows after the header"));
    }
    Ok(ConfusionMatrix { true_labels, predicted_labels, counts })
}

pub fn parse_hypotheses_csv(path: &Path) -> Result<Vec<Vec<i8>>> {
    parse_hypotheses_str(&read(path)?, &path.display().to_string())
}

/// One hypothesis per row, entries `+1`/`1`/`-1`, all rows the same length.
pub fn parse_hypotheses_str(text: &str, origin: &str) -> Result<Vec<Vec<i8>>> {
    let mut out: Vec<Vec<i8>> = Vec::new();
    for (i, record) in records(text).enumerate() {
        let record = record.map_err(|e| input_error(origin, i + 1, e.to_string()))?;
        let line = line_of(&record, i + 1);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| match cell {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(input_error(
                    origin,
                    line,
                    format!("column {}: {other:?} is not +1 or -1", col + 1),
                )),
            })
            .collect::<Result<Vec<i8>>>()?;
        if let Some(first) = out.first() {
            if first.len() != row.len() {
                return Err(input_error(
                    origin,
                    line,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(input_error(origin, 1, "no hypotheses"));
    }
    Ok(out)
}

/// `none`, `rep:N` or `rm:M`.
pub fn parse_code(text: &str) -> std::result::Result<CodeSpec, String> {
    let text = text.trim();
    if text == "none" {
        return Ok(CodeSpec::Uncoded);
    }
    let (kind, param) = text
        .split_once(':')
        .ok_or_else(|| format!("code {text:?} is not none, rep:N or rm:M"))?;
    let param: u64 = param.parse().map_err(|_| format!("code parameter {param:?} is not an integer"))?;
    match kind {
        "rep" => RepetitionCode::new(param).map(CodeSpec::Repetition).map_err(|e| e.to_string()),
        "rm" => u32::try_from(param)
            .map_err(|_| format!("m = {param} is too large"))
            .and_then(|m| ReedMullerCode::new(m).map_err(|e| e.to_string()))
            .map(CodeSpec::ReedMuller),
        other => Err(format!("unknown code kind {other:?}")),
    }
}

pub fn code_name(code: CodeSpec) -> String {
    match code {
        CodeSpec::Uncoded => "none".into(),
        CodeSpec::Repetition(c) => format!("rep:{}", c.n()),
        CodeSpec::ReedMuller(c) => format!("rm:{}", c.m()),
    }
}

/// Scenario values; every field optional so command-line flags can fill or
/// override them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    pub base_error: Option<f64>,
    pub noise_error: Option<f64>,
    pub code: Option<CodeSpec>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub target_error: Option<f64>,
    pub retrain_factor: Option<f64>,
    pub max_rounds: Option<u64>,
    pub epsilon: Option<f64>,
    pub strict: Option<bool>,
}

pub fn parse_scenario_file(path: &Path) -> Result<Scenario> {
    parse_scenario_str(&read(path)?, &path.display().to_string())
}

/// Flat `key = value` lines; `#` starts a comment.
pub fn parse_scenario_str(text: &str, origin: &str) -> Result<Scenario> {
    fn num<T: std::str::FromStr>(v: &str, key: &str, origin: &str, line: usize) -> Result<T> {
        v.parse().map_err(|_| input_error(origin, line, format!("{key}: cannot parse {v:?}")))
    }
    let mut s = Scenario::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| input_error(origin, line, format!("expected key = value, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "base_error" => s.base_error = Some(num(value, key, origin, line)?),
            "noise_error" => s.noise_error = Some(num(value, key, origin, line)?),
            "code" => s.code = Some(parse_code(value).map_err(|m| input_error(origin, line, m))?),
            "trials" => s.trials = Some(num(value, key, origin, line)?),
            "seed" => s.seed = Some(num(value, key, origin, line)?),
            "target_error" => s.target_error = Some(num(value, key, origin, line)?),
            "retrain_factor" => s.retrain_factor = Some(num(value, key, origin, line)?),
            "max_rounds" => s.max_rounds = Some(num(value, key, origin, line)?),
            "epsilon" => s.epsilon = Some(num(value, key, origin, line)?),
            "strict" => s.strict = Some(num(value, key, origin, line)?),
            other => return Err(input_error(origin, line, format!("unknown key {other:?}"))),
        }
    }
    Ok(s)
}

impl Scenario {
    /// Values from `overrides` win.
    pub fn merged(self, overrides: Scenario) -> Scenario {
        Scenario {
            base_error: overrides.base_error.or(self.base_error),
            noise_error: overrides.noise_error.or(self.noise_error),
            code: overrides.code.or(self.code),
            trials: overrides.trials.or(self.trials),
            seed: overrides.seed.or(self.seed),
            target_error: overrides.target_error.or(self.target_error),
            retrain_factor: overrides.retrain_factor.or(self.retrain_factor),
            max_rounds: overrides.max_rounds.or(self.max_rounds),
            epsilon: overrides.epsilon.or(self.epsilon),
            strict: overrides.strict.or(self.strict),
        }
    }

    /// Builds a validated config; `base_error` and `seed` are mandatory.
    pub fn into_config(self, default_code: CodeSpec) -> Result<SimulationConfig> {
        let base_error = self
            .base_error
            .ok_or_else(|| CliError::Usage("missing --base-error (or base_error in --config)".into()))?;
        let seed = self
            .seed
            .ok_or_else(|| CliError::Usage("missing --seed: randomized commands need an explicit seed".into()))?;
        let model = ClassifierChannelModel::new(base_error, self.noise_error.unwrap_or(0.0))?;
        let mut config =
            SimulationConfig::new(model, self.code.unwrap_or(default_code), self.trials.unwrap_or(1_000_000), seed);
        if let Some(v) = self.target_error {
            config.target_error = v;
        }
        if let Some(v) = self.retrain_factor {
            config.retrain_factor = v;
        }
        if let Some(v) = self.max_rounds {
            config.max_rounds = v;
        }
        if let Some(v) = self.epsilon {
            config.epsilon = v;
        }
        if self.strict == Some(false) {
            config.strictness = Strictness::NonStrict;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Columns `round,p_t,criterion_pass,measured_error,stderr,trials`.
pub fn trace_csv(trace: &EvolutionTrace) -> String {
    let mut out = String::from("round,p_t,criterion_pass,measured_error,stderr,trials\n");
    for r in &trace.rounds {
        let _ = writeln!(
            out,
            "{},{:?},{},{:?},{:?},{}",
            r.round,
            r.effective_error,
            r.criterion.passes(),
            r.measured_error,
            r.std_error,
            r.trials
        );
    }
    out
}
