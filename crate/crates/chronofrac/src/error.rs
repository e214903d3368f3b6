use thiserror::Error;

/// Errors shared across the whole crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0} is not in the time scale")]
    PointNotInScale(f64),
    #[error("point {0} is not in T^kappa (left-scattered maximum)")]
    NotInKappa(f64),
    #[error("no approach points exist on the required side of {0}")]
    NoApproach(f64),
    #[error("limit quotient did not converge at {t} (best estimate {best}, residual {residual}, {samples} samples)")]
    Divergent {
        t: f64,
        best: f64,
        residual: f64,
        samples: u32,
    },
    #[error("negative base {0} with non-odd-reciprocal exponent")]
    NegativeBaseUndefined(f64),
    #[error("invalid fractional order: {0}")]
    InvalidOrder(String),
    #[error("table-backed function has no entry at {0}")]
    TablePointMissing(f64),
    #[error("singular point: precondition (t-c)(sigma(t)-c) != 0 fails at {0}")]
    SingularPoint(f64),
    #[error("chain-rule hypothesis violated: no witness in [{lo}, {hi}]")]
    HypothesisViolated { lo: f64, hi: f64 },
    #[error("dense point {0} reached while iterating delta derivatives of a non-symbolic function")]
    UnsupportedDensePath(f64),
    #[error("window [{0}, {1}] contains no scale points")]
    WindowEmpty(f64, f64),
    #[error("point {0} lies outside the antiderivative window [{1}, {2}]")]
    OutsideWindow(f64, f64, f64),
    #[error("syntax error at position {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("division by zero at t = {0}")]
    DivisionByZero(f64),
    #[error("log of non-positive value {0}")]
    LogDomain(f64),
    #[error("expression is not differentiable: {0}")]
    NonDifferentiable(String),
    #[error("invalid time scale: {0}")]
    InvalidScale(String),
    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
    #[error("duplicate timestamp {0} with conflicting values")]
    DuplicateTimestampConflict(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
