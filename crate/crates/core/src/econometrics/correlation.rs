//! Pearson correlation and the lagged cross-correlation function.

use serde::{Deserialize, Serialize};

use super::distributions::t_two_sided_p;
use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub coefficient: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Pearson correlation of two series on identical dates, with a two-sided
/// p-value from the t transform on `n - 2` degrees of freedom.
pub fn pearson(x: &TimeSeries, y: &TimeSeries) -> Result<Correlation> {
    ensure_same_dates(x, y)?;
    pearson_slices(x.values(), y.values())
}

pub fn pearson_slices(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "correlation inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientLength { needed: 3, got: n });
    }
    let r = centered_correlation(x, y).ok_or(Error::ZeroVariance)?;
    let df = (n - 2) as f64;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        t_two_sided_p(r * (df / (1.0 - r * r)).sqrt(), df)?
    };
    Ok(Correlation {
        coefficient: r,
        p_value,
        n,
    })
}

/// Correlation with means and norms taken over the given windows.
fn centered_correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// How means and normalizers are computed at each lag.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcfMode {
    /// Means and norms over the overlapping pairs at each lag.
    #[default]
    Overlap,
    /// Full-series means and variances with an `n` normalizer, as R's `ccf`.
    FullSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrelation {
    pub lags: Vec<i64>,
    pub coefficients: Vec<f64>,
    pub mode: CcfMode,
}

impl CrossCorrelation {
    pub fn at(&self, lag: i64) -> Option<f64> {
        self.lags
            .iter()
            .position(|l| *l == lag)
            .map(|i| self.coefficients[i])
    }

    /// Lag with the largest coefficient (the smallest such lag on ties).
    pub fn argmax(&self) -> i64 {
        let mut best = 0;
        for i in 1..self.lags.len() {
            if self.coefficients[i] > self.coefficients[best] {
                best = i;
            }
        }
        self.lags[best]
    }
}

/// Correlation of `x[t + k]` with `y[t]` for `k` in `-max_lag..=max_lag`.
/// A peak at positive `k` means `y` leads `x`.
pub fn cross_correlation(
    x: &TimeSeries,
    y: &TimeSeries,
    max_lag: usize,
    mode: CcfMode,
) -> Result<CrossCorrelation> {
    ensure_same_dates(x, y)?;
    cross_correlation_slices(x.values(), y.values(), max_lag, mode)
}

pub fn cross_correlation_slices(
    x: &[f64],
    y: &[f64],
    max_lag: usize,
    mode: CcfMode,
) -> Result<CrossCorrelation> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::InvalidInput("cross-correlation inputs differ in length".into()));
    }
    if max_lag == 0 || max_lag >= n {
        return Err(Error::InvalidInput(format!(
            "max lag must be in 1..{n}, got {max_lag}"
        )));
    }
    if n - max_lag < 3 {
        return Err(Error::InsufficientLength {
            needed: max_lag + 3,
            got: n,
        });
    }
    let full = match mode {
        CcfMode::FullSeries => {
            let nf = n as f64;
            let mx = x.iter().sum::<f64>() / nf;
            let my = y.iter().sum::<f64>() / nf;
            let sx = x.iter().map(|v| (v - mx) * (v - mx)).sum::<f64>();
            let sy = y.iter().map(|v| (v - my) * (v - my)).sum::<f64>();
            if sx == 0.0 || sy == 0.0 {
                return Err(Error::ZeroVariance);
            }
            Some((mx, my, (sx * sy).sqrt()))
        }
        CcfMode::Overlap => None,
    };
    let k = max_lag as i64;
    let mut lags = Vec::with_capacity(2 * max_lag + 1);
    let mut coefficients = Vec::with_capacity(2 * max_lag + 1);
    for lag in -k..=k {
        // Pairs (x[i + lag], y[i]) with both indices in range.
        let (xs, ys) = if lag >= 0 {
            let l = lag as usize;
            (&x[l..], &y[..n - l])
        } else {
            let l = (-lag) as usize;
            (&x[..n - l], &y[l..])
        };
        let gamma = match full {
            None => centered_correlation(xs, ys).ok_or(Error::ZeroVariance)?,
            Some((mx, my, denom)) => {
                xs.iter().zip(ys).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / denom
            }
        };
        lags.push(lag);
        coefficients.push(gamma);
    }
    Ok(CrossCorrelation {
        lags,
        coefficients,
        mode,
    })
}

fn ensure_same_dates(x: &TimeSeries, y: &TimeSeries) -> Result<()> {
    if x.dates() != y.dates() {
        return Err(Error::InvalidSeries(
            "series are not aligned; align them on common dates first".into(),
        ));
    }
    Ok(())
}
