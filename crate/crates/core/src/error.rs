use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid price {value} at index {index}")]
    InvalidPrice { index: usize, value: f64 },

    #[error("dates must be consecutive days: {prev} is followed by {next}")]
    NonConsecutiveDates { prev: NaiveDate, next: NaiveDate },

    #[error("length mismatch: {dates} dates but {values} values")]
    LengthMismatch { dates: usize, values: usize },

    #[error("series too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("degenerate window ending {end_date}: zero variance")]
    DegenerateWindow { end_date: NaiveDate },

    #[error("singular design matrix")]
    Singular,

    #[error("path exploded at step {step} (|u| = {value:e})")]
    Explosion { step: usize, value: f64 },

    #[error("ensemble failed: {failed} of {total} realizations exploded")]
    EnsembleFailed { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
