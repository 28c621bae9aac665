//! Price-series early-warning pipeline: ingestion, analysis, model runs and
//! report output behind the `slowdown` binary.

pub mod analyze;
pub mod config;
pub mod error;
pub mod fetch;
pub mod load;
pub mod model;
pub mod report;
pub mod svg;

pub use error::{PipelineError, Result};
