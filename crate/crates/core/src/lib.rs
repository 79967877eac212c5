//! Sentiment indicators from dated text corpora and an econometric battery
//! for relating them to financial time series.
//!
//! - [`corpus`]: lexicons, corpora, tokenization and per-document scores
//! - [`indicators`]: negative news sentiment, bullish share, term volumes, composites
//! - [`timeseries`]: dated series and conditioning (gap filling, weekly means, returns, ...)
//! - [`econometrics`]: correlation, cross-correlation, OLS, Granger tests, lagged regression
//! - [`forecast`]: rolling one-step forecasts with MAPE and direction accuracy
//! - [`synth`]: seeded synthetic series and corpora with known structure
//! - [`cli`]: the `finsent` command-line driver

pub mod cli;
pub mod corpus;
pub mod econometrics;
pub mod error;
pub mod forecast;
pub mod indicators;
pub mod report;
pub mod synth;
pub mod timeseries;

pub use error::{Error, Result};
pub use timeseries::{Frequency, TimeSeries};
