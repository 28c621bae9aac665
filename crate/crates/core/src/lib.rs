//! Early-warning indicators of critical and stochastic transitions in
//! price-like time series, plus a bistable stochastic price model used to
//! compare them.

// `!(x > 0.0)` guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod indicators;
pub mod model;
pub mod preprocess;
pub mod series;
pub mod stationarity;
pub mod stats;

pub use error::{Error, Result};
pub use series::{PriceSeries, ResidualSeries};
