use std::path::PathBuf;

/// Library-wide error type.
///
/// Errors split into two broad classes: *validation* errors (bad inputs,
/// violated preconditions, malformed files) and *numerical* errors
/// (non-convergence, exhausted budgets). The CLI maps the former to exit
/// code 1 and the latter to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: cannot parse {text:?} as a positive decimal")]
    Parse {
        path: PathBuf,
        line: usize,
        text: String,
    },

    #[error("zero table not strictly increasing at index {index}: {prev} >= {next}")]
    NonMonotone { index: usize, prev: f64, next: f64 },

    #[error("requested {requested} zeros but source provides only {available}")]
    TooFewZeros { requested: usize, available: usize },

    #[error("first table entry {value} is outside the first-zero bracket (14, 14.2)")]
    FirstZeroBracket { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{quantity} = {value} is outside the supported range ({detail})")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        detail: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("quadrature did not converge within {evaluations} evaluations (estimated error {error:.3e})")]
    QuadratureBudget { evaluations: usize, error: f64 },

    #[error("found only {found} sign changes of Z(t) while scanning up to t = {t_max}")]
    ScanExhausted { found: usize, t_max: f64 },

    #[error("optimization failed: {0}")]
    Optimization(String),
}

impl Error {
    /// True for non-convergence / numerical failures, false for input
    /// validation problems.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureBudget { .. } | Error::ScanExhausted { .. } | Error::Optimization(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
