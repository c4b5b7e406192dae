use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument fell outside its admissible range.
    Domain { name: &'static str, value: f64, range: &'static str },
    /// Structured input violated an invariant (sums, signs, uniqueness).
    Validation(String),
    /// Lengths or shapes did not line up.
    Format(String),
    /// Exact enumeration requested beyond the configured cap.
    TooLarge { n: usize, cap: usize },
    /// No parameter choice can meet the request.
    Infeasible(String),
    /// Iteration cap hit before the stopping rule was met.
    NonConvergence { iterations: usize, best_estimate: f64, gap: f64 },
    /// A combination of otherwise valid settings that cannot work together.
    Configuration(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { name, value, range } => {
                write!(f, "{name} = {value} is outside {range}")
            }
            Error::Validation(msg) => write!(f, "invalid input: {msg}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::TooLarge { n, cap } => write!(
                f,
                "sample size {n} exceeds the exact enumeration cap {cap}; use the Monte Carlo estimator"
            ),
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::NonConvergence { iterations, best_estimate, gap } => write!(
                f,
                "no convergence after {iterations} iterations (best estimate {best_estimate}, gap {gap})"
            ),
            Error::Configuration(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { name, value, range: "[0, 1]" })
    }
}
