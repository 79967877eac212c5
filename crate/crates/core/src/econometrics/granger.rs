//! Nested-OLS F tests for Granger causality.

use serde::{Deserialize, Serialize};

use super::distributions::f_sf;
use super::ols::ols;
use super::regression::lagged_design;
use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    /// Candidate cause (its lags are added in the unrestricted model).
    pub cause: String,
    /// Series being predicted.
    pub effect: String,
    pub lag: usize,
    pub f_stat: f64,
    pub p_value: f64,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub n_obs: usize,
}

impl GrangerResult {
    pub fn direction(&self) -> String {
        format!("{}\u{2192}{}", self.cause, self.effect)
    }
}

/// Tests whether lags of `x` help predict `y` beyond `y`'s own lags.
///
/// Both models are fitted on the same rows, so
/// `F = ((rss_r - rss_u) / L) / (rss_u / (T - 2L - 1))` with `T` regression rows.
pub fn granger(x: &TimeSeries, y: &TimeSeries, lag: usize) -> Result<GrangerResult> {
    granger_named(x, y, lag, "x", "y")
}

pub fn granger_named(
    x: &TimeSeries,
    y: &TimeSeries,
    lag: usize,
    x_name: &str,
    y_name: &str,
) -> Result<GrangerResult> {
    if lag == 0 {
        return Err(Error::InvalidInput("Granger lag must be positive".into()));
    }
    // T - 2L - 1 >= 1 with T = n - L.
    let needed = 3 * lag + 2;
    if y.len() < needed {
        return Err(Error::InsufficientLength {
            needed,
            got: y.len(),
        });
    }
    let full = lagged_design(y, &[x], lag)?;
    let unrestricted = ols(&full.design, &full.response)?;
    let restricted = ols(&full.design.leading_columns(1 + lag), &full.response)?;

    let rows = full.response.len();
    let df_den = rows - 2 * lag - 1;
    let rss_u = unrestricted.rss;
    // Nested fits on identical rows: rounding can push rss_u a hair above rss_r.
    let rss_r = restricted.rss.max(rss_u);
    let f_stat = if rss_u > 0.0 {
        (((rss_r - rss_u) / lag as f64) / (rss_u / df_den as f64)).max(0.0)
    } else if rss_r > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let p_value = f_sf(f_stat, lag as f64, df_den as f64)?;
    Ok(GrangerResult {
        cause: x_name.to_string(),
        effect: y_name.to_string(),
        lag,
        f_stat,
        p_value,
        rss_restricted: rss_r,
        rss_unrestricted: rss_u,
        df_num: lag,
        df_den,
        n_obs: rows,
    })
}

/// Both directions of the Granger test for every requested lag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrangerTable {
    pub x_name: String,
    pub y_name: String,
    pub lags: Vec<usize>,
    /// For each lag in order: x→y, then y→x.
    pub results: Vec<GrangerResult>,
}

impl GrangerTable {
    pub fn forward(&self) -> impl Iterator<Item = &GrangerResult> {
        self.results.iter().step_by(2)
    }

    pub fn backward(&self) -> impl Iterator<Item = &GrangerResult> {
        self.results.iter().skip(1).step_by(2)
    }
}

pub fn granger_table(
    x: &TimeSeries,
    y: &TimeSeries,
    x_name: &str,
    y_name: &str,
    lags: &[usize],
) -> Result<GrangerTable> {
    let mut results = Vec::with_capacity(lags.len() * 2);
    for &lag in lags {
        results.push(granger_named(x, y, lag, x_name, y_name)?);
        results.push(granger_named(y, x, lag, y_name, x_name)?);
    }
    Ok(GrangerTable {
        x_name: x_name.to_string(),
        y_name: y_name.to_string(),
        lags: lags.to_vec(),
        results,
    })
}
