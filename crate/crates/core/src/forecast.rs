//! Expanding-window one-step-ahead forecasts from lagged linear models,
//! scored by mean absolute percentage error and direction accuracy.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::econometrics::{lagged_design, ols};
use crate::error::{Error, Result};
use crate::timeseries::{StandardizationParams, TimeSeries};

/// Lag order and regressors of a forecasting model. With no exogenous
/// series this is the autoregressive baseline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n_lags: usize,
    #[serde(default)]
    pub exogenous_names: Vec<String>,
    #[serde(default)]
    pub standardize_inputs: bool,
}

impl ModelSpec {
    pub fn baseline(n_lags: usize) -> Self {
        Self {
            n_lags,
            exogenous_names: Vec::new(),
            standardize_inputs: false,
        }
    }

    pub fn with_exogenous<I, S>(n_lags: usize, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            n_lags,
            exogenous_names: names.into_iter().map(Into::into).collect(),
            standardize_inputs: false,
        }
    }

    pub fn standardized(mut self, on: bool) -> Self {
        self.standardize_inputs = on;
        self
    }

    pub fn is_baseline(&self) -> bool {
        self.exogenous_names.is_empty()
    }

    fn n_params(&self) -> usize {
        1 + (1 + self.exogenous_names.len()) * self.n_lags
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub spec: ModelSpec,
    pub dates: Vec<NaiveDate>,
    pub actuals: Vec<f64>,
    pub predictions: Vec<f64>,
    /// Actual value one step before each forecast date.
    pub anchors: Vec<f64>,
    /// `100 * |(y - ŷ) / y|` per step.
    pub per_step_abs_pct_error: Vec<f64>,
    pub mape: f64,
    pub direction_accuracy: f64,
}

/// Mean absolute percentage error, in percent.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    let errors = abs_pct_errors(actual, predicted)?;
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

pub fn abs_pct_errors(actual: &[f64], predicted: &[f64]) -> Result<Vec<f64>> {
    if actual.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "{} actual values but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::InsufficientLength { needed: 1, got: 0 });
    }
    actual
        .iter()
        .zip(predicted)
        .enumerate()
        .map(|(i, (y, p))| {
            if *y == 0.0 {
                Err(Error::ZeroActual { index: i })
            } else {
                Ok(((y - p) / y).abs() * 100.0)
            }
        })
        .collect()
}

/// Share of steps where `(ŷ - anchor) * (y - anchor) > 0`; a zero product
/// counts as a miss.
pub fn direction_accuracy(anchors: &[f64], actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if anchors.len() != actual.len() || actual.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "direction accuracy needs equal lengths, got {}/{}/{}",
            anchors.len(),
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::InsufficientLength { needed: 1, got: 0 });
    }
    let hits = anchors
        .iter()
        .zip(actual)
        .zip(predicted)
        .filter(|((a, y), p)| (*p - *a) * (*y - *a) > 0.0)
        .count();
    Ok(hits as f64 / actual.len() as f64)
}

fn pick_exogenous<'a>(
    target: &TimeSeries,
    exogenous: &'a [(String, TimeSeries)],
    spec: &ModelSpec,
) -> Result<Vec<&'a TimeSeries>> {
    spec.exogenous_names
        .iter()
        .map(|name| {
            let s = exogenous
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, s)| s)
                .ok_or_else(|| Error::UnknownSeries(name.clone()))?;
            if s.dates() != target.dates() {
                return Err(Error::InvalidSeries(format!(
                    "{name:?} is not aligned with the forecast target"
                )));
            }
            Ok(s)
        })
        .collect()
}

/// Forecasts each of the last `test_window` observations from a model
/// refitted on every row strictly before it. Nothing dated at or after the
/// forecast date enters the fit, the standardization or the regressors.
pub fn rolling_one_step(
    target: &TimeSeries,
    exogenous: &[(String, TimeSeries)],
    spec: &ModelSpec,
    test_window: usize,
) -> Result<ForecastReport> {
    if spec.n_lags == 0 {
        return Err(Error::InvalidInput("model needs at least one lag".into()));
    }
    if test_window == 0 {
        return Err(Error::InvalidInput("test window must be positive".into()));
    }
    let exo = pick_exogenous(target, exogenous, spec)?;
    let len = target.len();
    let n = spec.n_lags;
    if test_window + n >= len {
        return Err(Error::InsufficientHistory(format!(
            "{len} observations cannot cover {test_window} test steps with {n} lags"
        )));
    }
    let first_train_rows = len - test_window - n;
    if first_train_rows <= spec.n_params() {
        return Err(Error::InsufficientHistory(format!(
            "first refit has {first_train_rows} rows for {} parameters",
            spec.n_params()
        )));
    }

    let mut dates = Vec::with_capacity(test_window);
    let mut actuals = Vec::with_capacity(test_window);
    let mut predictions = Vec::with_capacity(test_window);
    let mut anchors = Vec::with_capacity(test_window);
    for t in len - test_window..len {
        let date = target.dates()[t];
        let pred = forecast_at(target, &exo, spec, t).map_err(|e| Error::Refit {
            date,
            source: Box::new(e),
        })?;
        dates.push(date);
        actuals.push(target.values()[t]);
        predictions.push(pred);
        anchors.push(target.values()[t - 1]);
    }
    let per_step_abs_pct_error = abs_pct_errors(&actuals, &predictions)?;
    let mape = mape(&actuals, &predictions)?;
    let direction_accuracy = direction_accuracy(&anchors, &actuals, &predictions)?;
    Ok(ForecastReport {
        spec: spec.clone(),
        dates,
        actuals,
        predictions,
        anchors,
        per_step_abs_pct_error,
        mape,
        direction_accuracy,
    })
}

impl ForecastReport {
    /// The same forecasts scored after mapping actuals, predictions and
    /// anchors through `f` (for example `exp` to score a log-scale model on
    /// the original levels).
    pub fn map_levels(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let map = |v: &[f64]| v.iter().map(|x| f(*x)).collect::<Vec<_>>();
        let (actuals, predictions, anchors) = (map(&self.actuals), map(&self.predictions), map(&self.anchors));
        Ok(ForecastReport {
            spec: self.spec.clone(),
            dates: self.dates.clone(),
            per_step_abs_pct_error: abs_pct_errors(&actuals, &predictions)?,
            mape: mape(&actuals, &predictions)?,
            direction_accuracy: direction_accuracy(&anchors, &actuals, &predictions)?,
            actuals,
            predictions,
            anchors,
        })
    }
}

/// Prediction for index `t` using observations `0..t` only.
fn forecast_at(target: &TimeSeries, exo: &[&TimeSeries], spec: &ModelSpec, t: usize) -> Result<f64> {
    let n = spec.n_lags;
    let dates = target.dates()[..t].to_vec();
    let mut target_params = None;
    let mut prepare = |values: &[f64], is_target: bool| -> Result<Vec<f64>> {
        let history = &values[..t];
        if !spec.standardize_inputs {
            return Ok(history.to_vec());
        }
        let params = StandardizationParams::estimate(history)?;
        if is_target {
            target_params = Some(params);
        }
        Ok(history.iter().map(|v| params.apply(*v)).collect())
    };
    let y = prepare(target.values(), true)?;
    let xs: Vec<Vec<f64>> = exo
        .iter()
        .map(|s| prepare(s.values(), false))
        .collect::<Result<_>>()?;

    let freq = target.frequency();
    let y_hist = TimeSeries::from_parts(freq, dates.clone(), y.clone())?;
    let x_hist: Vec<TimeSeries> = xs
        .iter()
        .map(|v| TimeSeries::from_parts(freq, dates.clone(), v.clone()))
        .collect::<Result<_>>()?;
    let x_refs: Vec<&TimeSeries> = x_hist.iter().collect();
    let train = lagged_design(&y_hist, &x_refs, n)?;
    let fit = ols(&train.design, &train.response)?;

    let mut row = Vec::with_capacity(spec.n_params());
    row.push(1.0);
    for block in std::iter::once(&y).chain(xs.iter()) {
        row.extend((1..=n).map(|lag| block[t - lag]));
    }
    let pred = fit.predict(&row);
    Ok(match target_params {
        Some(p) => p.invert(pred),
        None => pred,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub date: NaiveDate,
    pub model0_err: f64,
    pub model1_err: f64,
}

/// Baseline and augmented model evaluated on the same test dates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub model0: ForecastReport,
    pub model1: ForecastReport,
    pub error_curve: Vec<ErrorPoint>,
}

impl ModelComparison {
    /// `date,model0_err,model1_err` rows of absolute percentage errors.
    pub fn error_curve_csv(&self) -> String {
        let mut out = String::from("date,model0_err,model1_err\n");
        for p in &self.error_curve {
            out.push_str(&format!(
                "{},{},{}\n",
                p.date.format("%Y-%m-%d"),
                p.model0_err,
                p.model1_err
            ));
        }
        out
    }
}

pub fn compare_models(
    target: &TimeSeries,
    exogenous: &[(String, TimeSeries)],
    spec0: &ModelSpec,
    spec1: &ModelSpec,
    test_window: usize,
) -> Result<ModelComparison> {
    let model0 = rolling_one_step(target, exogenous, spec0, test_window)?;
    let model1 = rolling_one_step(target, exogenous, spec1, test_window)?;
    Ok(ModelComparison::pair(model0, model1))
}

impl ModelComparison {
    fn pair(model0: ForecastReport, model1: ForecastReport) -> Self {
        let error_curve = model0
        .dates
        .iter()
        .zip(&model0.per_step_abs_pct_error)
        .zip(&model1.per_step_abs_pct_error)
        .map(|((d, e0), e1)| ErrorPoint {
            date: *d,
            model0_err: *e0,
            model1_err: *e1,
        })
        .collect();
        ModelComparison {
            model0,
            model1,
            error_curve,
        }
    }

    /// Both reports rescored through [`ForecastReport::map_levels`].
    pub fn map_levels(&self, f: impl Fn(f64) -> f64 + Copy) -> Result<Self> {
        Ok(Self::pair(self.model0.map_levels(f)?, self.model1.map_levels(f)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::Frequency;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::from_values(Frequency::Weekly, NaiveDate::from_ymd_opt(2011, 1, 1).unwrap(), values).unwrap()
    }

    #[test]
    fn mape_arithmetic() {
        assert_eq!(mape(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((mape(&[100.0], &[110.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!((mape(&[100.0, 200.0], &[90.0, 220.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(mape(&[1.0, 0.0], &[1.0, 1.0]), Err(Error::ZeroActual { index: 1 })));
    }

    #[test]
    fn direction_counting() {
        let anchors = [1.0, 2.0, 3.0, 4.0];
        let actual = [2.0, 1.0, 4.0, 5.0];
        assert_eq!(direction_accuracy(&anchors, &actual, &[1.5, 2.5, 3.5, 4.5]).unwrap(), 0.75);
        assert_eq!(direction_accuracy(&anchors, &actual, &[1.5, 0.5, 3.5, 4.5]).unwrap(), 1.0);
        assert_eq!(direction_accuracy(&anchors, &actual, &anchors).unwrap(), 0.0);
        assert!(direction_accuracy(&anchors, &actual, &[1.0]).is_err());
    }

    #[test]
    fn exact_ar1() {
        let y: Vec<f64> = (0..40).map(|i| 1000.0 * 0.5f64.powi(i) + 1.0).collect();
        // y_t - 1 = 0.5 (y_{t-1} - 1): exactly linear in one lag with intercept 0.5.
        let r = rolling_one_step(&series(y), &[], &ModelSpec::baseline(1), 10).unwrap();
        assert!(r.mape < 1e-8, "mape {}", r.mape);
        assert_eq!(r.direction_accuracy, 1.0);
        assert_eq!(r.dates.len(), 10);
    }

    #[test]
    fn history_checks() {
        let y = series((0..20).map(|i| 10.0 + (i as f64).sin()).collect());
        assert!(matches!(
            rolling_one_step(&y, &[], &ModelSpec::baseline(1), 19),
            Err(Error::InsufficientHistory(_))
        ));
        assert!(matches!(
            rolling_one_step(&y, &[], &ModelSpec::with_exogenous(1, ["x"]), 5),
            Err(Error::UnknownSeries(_))
        ));
    }
}
