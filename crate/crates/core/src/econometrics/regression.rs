//! Distributed-lag designs and the multi-source lagged regression.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::linalg::Matrix;
use super::ols::{ols, RegressionFit};
use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Regressors and response for a lagged model, one row per dated response.
#[derive(Clone, Debug, PartialEq)]
pub struct LaggedDesign {
    pub design: Matrix,
    pub response: Vec<f64>,
    pub dates: Vec<NaiveDate>,
}

/// Builds rows `[1, y(t-1..t-n), x1(t-1..t-n), ...]` with response `y(t)`.
/// The first `n_lags` dates have incomplete history and are dropped.
pub fn lagged_design(target: &TimeSeries, exogenous: &[&TimeSeries], n_lags: usize) -> Result<LaggedDesign> {
    if n_lags == 0 {
        return Err(Error::InvalidInput("number of lags must be positive".into()));
    }
    if exogenous.iter().any(|x| x.dates() != target.dates()) {
        return Err(Error::InvalidSeries(
            "lagged regressors must share the target's dates; align them first".into(),
        ));
    }
    let len = target.len();
    if len <= n_lags + 1 {
        return Err(Error::InsufficientLength {
            needed: n_lags + 2,
            got: len,
        });
    }
    let blocks: Vec<&[f64]> = std::iter::once(target.values())
        .chain(exogenous.iter().map(|x| x.values()))
        .collect();
    let cols = 1 + blocks.len() * n_lags;
    let rows = len - n_lags;
    let mut design = Matrix::zeros(rows, cols);
    for r in 0..rows {
        let t = r + n_lags;
        design.set(r, 0, 1.0);
        for (b, values) in blocks.iter().enumerate() {
            for lag in 1..=n_lags {
                design.set(r, 1 + b * n_lags + lag - 1, values[t - lag]);
            }
        }
    }
    Ok(LaggedDesign {
        design,
        response: target.values()[n_lags..].to_vec(),
        dates: target.dates()[n_lags..].to_vec(),
    })
}

/// Coefficient and p-value of one (variable, lag) regressor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagTerm {
    pub coefficient: f64,
    pub p_value: f64,
}

/// Own-lag plus exogenous-lag regression, reported per variable and lag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaggedRegression {
    /// Target first, then exogenous series in input order.
    pub variables: Vec<String>,
    pub n_lags: usize,
    pub fit: RegressionFit,
    /// Own lags only, fitted on the same rows.
    pub baseline: RegressionFit,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
}

impl LaggedRegression {
    pub fn term(&self, variable: usize, lag: usize) -> LagTerm {
        let c = 1 + variable * self.n_lags + lag - 1;
        LagTerm {
            coefficient: self.fit.coefficients[c],
            p_value: self.fit.p_values[c],
        }
    }

    pub fn intercept(&self) -> LagTerm {
        LagTerm {
            coefficient: self.fit.coefficients[0],
            p_value: self.fit.p_values[0],
        }
    }
}

pub fn multiple_lagged_regression(
    target_name: &str,
    target: &TimeSeries,
    exogenous: &[(String, TimeSeries)],
    n_lags: usize,
) -> Result<LaggedRegression> {
    let exo: Vec<&TimeSeries> = exogenous.iter().map(|(_, s)| s).collect();
    let needed = (exo.len() + 1) * n_lags + 2;
    if target.len() < needed {
        return Err(Error::InsufficientLength {
            needed,
            got: target.len(),
        });
    }
    let lagged = lagged_design(target, &exo, n_lags)?;
    let fit = ols(&lagged.design, &lagged.response)?;
    let baseline = ols(&lagged.design.leading_columns(1 + n_lags), &lagged.response)?;
    Ok(LaggedRegression {
        variables: std::iter::once(target_name.to_string())
            .chain(exogenous.iter().map(|(n, _)| n.clone()))
            .collect(),
        n_lags,
        fit,
        baseline,
        first_date: lagged.dates[0],
        last_date: *lagged.dates.last().expect("non-empty design"),
    })
}
