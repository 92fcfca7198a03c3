use thiserror::Error;

/// Crate-wide error type.
///
/// Variants map onto the CLI exit-code classes: configuration problems,
/// input parse failures, and numerical failures are distinguished so that
/// scripts can react to each.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation was handed input that violates its preconditions
    /// (non-positive dt, mismatched lengths, unsorted streams, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A computation produced or detected non-finite / non-positive
    /// quantities where positive finite ones are required.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An encoder calibration state fell below the floor that guards the
    /// division in the observation model.
    #[error("singular observation model: {0}")]
    SingularModel(String),

    /// Both variances of a measurement pair are below the variance floor.
    #[error("degenerate variances: both measurements claim (near-)zero variance")]
    DegenerateVariance,

    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bad configuration file or command-line option.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed input file; carries every offending line.
    #[error("parse error in {path}: {}", format_bad_lines(.lines))]
    Parse {
        path: String,
        lines: Vec<(usize, String)>,
    },

    /// An internal invariant was violated.
    #[error("logic error: {0}")]
    Logic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_bad_lines(lines: &[(usize, String)]) -> String {
    lines
        .iter()
        .map(|(n, msg)| format!("line {n}: {msg}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
