//! Crate-wide error type.
//!
//! Every fallible operation in the crate returns [`Error`]. Each variant maps
//! to one of two coarse categories used by the CLI to pick an exit code:
//! input/validation problems ([`ErrorCategory::Data`]) and numerical failures
//! ([`ErrorCategory::Numerical`]).

use chrono::NaiveDate;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Malformed or invalid input data (exit code 2).
    Data,
    /// Numerical failure such as a singular system or non-convergence (exit code 3).
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // ---- ingest ----
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("duplicate date at line {line}: {date}")]
    DuplicateDate { line: u64, date: NaiveDate },
    #[error("non-positive price at line {line}: {value}")]
    NonPositivePrice { line: u64, value: f64 },
    #[error("crossed quote at line {line}: bid {bid} > ask {ask}")]
    CrossedQuote { line: u64, bid: f64, ask: f64 },
    #[error("negative open interest at line {line}")]
    NegativeOpenInterest { line: u64 },
    #[error("expiry before quote date at line {line}")]
    ExpiryBeforeQuote { line: u64 },
    #[error("duplicate quote key at line {line}")]
    DuplicateQuote { line: u64 },
    #[error("window {start}..{end} leaves fewer than 2 observations")]
    EmptyWindow { start: NaiveDate, end: NaiveDate },
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    // ---- stats ----
    #[error("too few observations: have {have}, need {need}")]
    TooFewObservations { have: usize, need: usize },
    #[error("zero-variance input")]
    ZeroVariance,
    #[error("singular regression design")]
    SingularRegression,
    #[error("window of {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },

    // ---- garch / estimation ----
    #[error("non-positive conditional variance at step {index}")]
    NonPositiveVariance { index: usize },
    #[error("explosive model: persistence {persistence} exceeds 1")]
    ExplosiveModel { persistence: f64 },
    #[error("degenerate series: zero variance")]
    DegenerateSeries,
    #[error("singular Hessian: standard errors unavailable")]
    SingularHessian,
    #[error("invalid transition matrix: {0}")]
    InvalidTransition(String),
    #[error("reducible chain: both off-diagonal transition entries are zero")]
    ReducibleChain,

    // ---- selection ----
    #[error("negative likelihood ratio {0}: extended model is not a superset or its fit failed")]
    NegativeLikelihoodRatio(f64),

    // ---- surface ----
    #[error("no quotes for date {0}")]
    NoQuotesForDate(NaiveDate),
    #[error("insufficient quote dates: have {have}, need {need}")]
    InsufficientDates { have: usize, need: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            MalformedRow { .. }
            | DuplicateDate { .. }
            | NonPositivePrice { .. }
            | CrossedQuote { .. }
            | NegativeOpenInterest { .. }
            | ExpiryBeforeQuote { .. }
            | DuplicateQuote { .. }
            | EmptyWindow { .. }
            | InvalidSpec(_)
            | TooFewObservations { .. }
            | WindowTooLarge { .. }
            | InvalidTransition(_)
            | ReducibleChain
            | NoQuotesForDate(_)
            | InsufficientDates { .. }
            | Io(_) => ErrorCategory::Data,
            ZeroVariance
            | SingularRegression
            | NonPositiveVariance { .. }
            | ExplosiveModel { .. }
            | DegenerateSeries
            | SingularHessian
            | NegativeLikelihoodRatio(_) => ErrorCategory::Numerical,
        }
    }
}
