//! Dated numeric series and the conditioning steps applied before analysis:
//! gap filling, alignment, weekly aggregation, log transforms, returns,
//! standard scores and smoothing.
//!
//! A missing observation is represented by the absence of its date. Every
//! operation returns a new series; `TimeSeries` values are never mutated in
//! place once built.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Weekly,
}

impl Frequency {
    pub fn step_days(self) -> u64 {
        match self {
            Frequency::Daily => 1,
            Frequency::Weekly => 7,
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Daily => f.write_str("daily"),
            Frequency::Weekly => f.write_str("weekly"),
        }
    }
}

/// Mean and standard deviation used to map a series to standard scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub mean: f64,
    pub std: f64,
}

impl StandardizationParams {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        if !(std > 0.0) || !std.is_finite() || !mean.is_finite() {
            return Err(Error::InvalidInput(format!(
                "standardization std must be positive and finite, got {std}"
            )));
        }
        Ok(Self { mean, std })
    }

    /// Sample mean and `n - 1` standard deviation of `values`.
    pub fn estimate(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientLength {
                needed: 2,
                got: values.len(),
            });
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let std = (ss / (n - 1.0)).sqrt();
        if !(std > 0.0) {
            return Err(Error::ZeroVariance);
        }
        Ok(Self { mean, std })
    }

    pub fn apply(&self, value: f64) -> f64 {
        (value - self.mean) / self.std
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Dated observations with strictly increasing dates and finite values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    frequency: Frequency,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(frequency: Frequency, points: Vec<(NaiveDate, f64)>) -> Result<Self> {
        let (dates, values) = points.into_iter().unzip();
        Self::from_parts(frequency, dates, values)
    }

    pub fn from_parts(frequency: Frequency, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidSeries(format!(
                    "dates must be strictly increasing ({} follows {})",
                    w[1], w[0]
                )));
            }
            if frequency == Frequency::Weekly && (w[1] - w[0]).num_days() % 7 != 0 {
                return Err(Error::InvalidSeries(format!(
                    "weekly observations {} and {} are not a whole number of weeks apart",
                    w[0], w[1]
                )));
            }
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value {v} at {}",
                dates[i]
            )));
        }
        Ok(Self {
            frequency,
            dates,
            values,
        })
    }

    /// Consecutive observations starting at `start`, one step of `frequency` apart.
    pub fn from_values(frequency: Frequency, start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let step = frequency.step_days();
        let dates = (0..values.len() as u64)
            .map(|i| start + Days::new(i * step))
            .collect();
        Self::from_parts(frequency, dates, values)
    }

    pub fn empty(frequency: Frequency) -> Self {
        Self {
            frequency,
            dates: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.dates.first().copied()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.dates
            .binary_search(&date)
            .ok()
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    /// Applies `f` to every value, keeping dates.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_parts(
            self.frequency,
            self.dates.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Observations strictly before `date`.
    pub fn before(&self, date: NaiveDate) -> Self {
        let end = self.dates.partition_point(|d| *d < date);
        Self {
            frequency: self.frequency,
            dates: self.dates[..end].to_vec(),
            values: self.values[..end].to_vec(),
        }
    }

    /// Observations with dates in `[from, to]`.
    pub fn window(&self, from: NaiveDate, to: NaiveDate) -> Self {
        let start = self.dates.partition_point(|d| *d < from);
        let end = self.dates.partition_point(|d| *d <= to);
        let end = end.max(start);
        Self {
            frequency: self.frequency,
            dates: self.dates[start..end].to_vec(),
            values: self.values[start..end].to_vec(),
        }
    }

    /// True when consecutive observations are exactly one frequency step apart.
    pub fn is_regular(&self) -> bool {
        let step = self.frequency.step_days() as i64;
        self.dates
            .windows(2)
            .all(|w| (w[1] - w[0]).num_days() == step)
    }

    /// Number of calendar steps between the first and last date that have no observation.
    pub fn gap_count(&self) -> usize {
        match (self.first_date(), self.last_date()) {
            (Some(a), Some(b)) => {
                let span = (b - a).num_days() as u64 / self.frequency.step_days();
                span as usize + 1 - self.len()
            }
            _ => 0,
        }
    }
}

/// Fills interior calendar-day gaps by linear interpolation between the
/// nearest observed neighbours. Observed points are kept unchanged and no
/// values are invented before the first or after the last observation.
pub fn fill_missing_linear(s: &TimeSeries) -> Result<TimeSeries> {
    if s.len() < 2 {
        return Err(Error::InsufficientLength {
            needed: 2,
            got: s.len(),
        });
    }
    let step = s.frequency.step_days();
    let mut dates = Vec::with_capacity(s.len());
    let mut values = Vec::with_capacity(s.len());
    for i in 0..s.len() - 1 {
        let (d0, v0) = (s.dates[i], s.values[i]);
        let (d1, v1) = (s.dates[i + 1], s.values[i + 1]);
        dates.push(d0);
        values.push(v0);
        let span = (d1 - d0).num_days() as u64 / step;
        for k in 1..span {
            let frac = k as f64 / span as f64;
            dates.push(d0 + Days::new(k * step));
            values.push(v0 + (v1 - v0) * frac);
        }
    }
    dates.push(s.dates[s.len() - 1]);
    values.push(s.values[s.len() - 1]);
    TimeSeries::from_parts(s.frequency, dates, values)
}

/// `log(S[t+dt]) - log(S[t])`, dated at `t + dt`.
pub fn log_return(s: &TimeSeries, dt: usize) -> Result<TimeSeries> {
    if dt == 0 {
        return Err(Error::InvalidInput("return horizon must be positive".into()));
    }
    if dt >= s.len() {
        return Err(Error::InsufficientLength {
            needed: dt + 1,
            got: s.len(),
        });
    }
    if !s.is_regular() {
        return Err(Error::InvalidSeries(format!(
            "log returns need a gap-free {} series; fill missing observations first",
            s.frequency
        )));
    }
    let logs = log_transform(s)?;
    let lv = logs.values();
    let values = (dt..lv.len()).map(|t| lv[t] - lv[t - dt]).collect();
    TimeSeries::from_parts(s.frequency, s.dates[dt..].to_vec(), values)
}

/// Natural logarithm of every value.
pub fn log_transform(s: &TimeSeries) -> Result<TimeSeries> {
    if let Some((date, value)) = s.iter().find(|(_, v)| *v <= 0.0) {
        return Err(Error::NonPositive { date, value });
    }
    s.map_values(libm::log)
}

/// Last day of the week containing `date`, for weeks ending on `anchor`.
pub fn week_ending(date: NaiveDate, anchor: Weekday) -> NaiveDate {
    let today = date.weekday().num_days_from_monday();
    let end = anchor.num_days_from_monday();
    let ahead = (end + 7 - today) % 7;
    date + Days::new(ahead as u64)
}

/// Averages the observed daily values of each week (weeks end on `anchor`),
/// dated by the week-ending day. Weeks without observations are omitted.
pub fn to_weekly_mean(s: &TimeSeries, anchor: Weekday) -> Result<TimeSeries> {
    if s.frequency != Frequency::Daily {
        return Err(Error::InvalidSeries(
            "weekly aggregation expects a daily series".into(),
        ));
    }
    let mut buckets: BTreeMap<NaiveDate, (f64, usize)> = BTreeMap::new();
    for (d, v) in s.iter() {
        let entry = buckets.entry(week_ending(d, anchor)).or_insert((0.0, 0));
        entry.0 += v;
        entry.1 += 1;
    }
    let points = buckets
        .into_iter()
        .map(|(d, (sum, n))| (d, sum / n as f64))
        .collect();
    TimeSeries::new(Frequency::Weekly, points)
}

/// Maps values to standard scores. Without `params` the sample mean and
/// `n - 1` standard deviation of `s` are used; the parameters actually applied
/// are returned so they can be reused on later data.
pub fn standardize(
    s: &TimeSeries,
    params: Option<StandardizationParams>,
) -> Result<(TimeSeries, StandardizationParams)> {
    let params = match params {
        Some(p) => p,
        None => StandardizationParams::estimate(s.values())?,
    };
    Ok((s.map_values(|v| params.apply(v))?, params))
}

/// Trailing mean over `window` observations, including the current one.
pub fn moving_average(s: &TimeSeries, window: usize) -> Result<TimeSeries> {
    if window == 0 {
        return Err(Error::InvalidInput("moving average window must be positive".into()));
    }
    if window > s.len() {
        return Err(Error::InsufficientLength {
            needed: window,
            got: s.len(),
        });
    }
    let values = s
        .values
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    TimeSeries::from_parts(s.frequency, s.dates[window - 1..].to_vec(), values)
}

/// Restricts both series to their common dates.
pub fn align(a: &TimeSeries, b: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    let mut aligned = align_all(&[a, b])?;
    let b = aligned.pop().expect("two series");
    let a = aligned.pop().expect("two series");
    Ok((a, b))
}

/// Restricts every series to the dates present in all of them.
pub fn align_all(series: &[&TimeSeries]) -> Result<Vec<TimeSeries>> {
    let Some(first) = series.first() else {
        return Err(Error::InvalidInput("nothing to align".into()));
    };
    if let Some(s) = series.iter().find(|s| s.frequency != first.frequency) {
        return Err(Error::InvalidSeries(format!(
            "cannot align {} and {} series",
            first.frequency, s.frequency
        )));
    }
    let mut common: Vec<NaiveDate> = first.dates.clone();
    for s in &series[1..] {
        common.retain(|d| s.dates.binary_search(d).is_ok());
    }
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    series
        .iter()
        .map(|s| {
            let values = common
                .iter()
                .map(|d| s.get(*d).expect("date in intersection"))
                .collect();
            TimeSeries::from_parts(s.frequency, common.clone(), values)
        })
        .collect()
}

/// Sign flip of every value.
pub fn invert(s: &TimeSeries) -> TimeSeries {
    TimeSeries {
        frequency: s.frequency,
        dates: s.dates.clone(),
        values: s.values.iter().map(|v| -v).collect(),
    }
}

/// Parses `mon`, `tuesday`, `Sat`, ... into a weekday.
pub fn parse_weekday(s: &str) -> Result<Weekday> {
    Weekday::from_str(s.trim()).map_err(|_| Error::Config(format!("unknown weekday {s:?}")))
}

/// Reads a `date,value` CSV. When `frequency` is `None` the series is weekly if
/// every spacing is a whole number of weeks, daily otherwise.
pub fn read_csv(path: impl AsRef<Path>, frequency: Option<Frequency>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim().eq_ignore_ascii_case("date,value") => {}
        Some((_, header)) => {
            return Err(parse_err(1, format!("expected header `date,value`, found {header:?}")))
        }
        None => return Err(parse_err(1, "missing header `date,value`".into())),
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (d, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(i + 1, format!("expected `date,value`, found {line:?}")))?;
        let date = NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
            .map_err(|e| parse_err(i + 1, format!("bad date {d:?}: {e}")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|e| parse_err(i + 1, format!("bad value {v:?}: {e}")))?;
        points.push((date, value));
    }
    points.sort_by_key(|p| p.0);
    let frequency = frequency.unwrap_or_else(|| infer_frequency(&points));
    TimeSeries::new(frequency, points).map_err(|e| parse_err(0, e.to_string()))
}

fn infer_frequency(points: &[(NaiveDate, f64)]) -> Frequency {
    let weekly = points.len() >= 2
        && points
            .windows(2)
            .all(|w| (w[1].0 - w[0].0).num_days() % 7 == 0);
    if weekly {
        Frequency::Weekly
    } else {
        Frequency::Daily
    }
}

/// Renders the series as `date,value` CSV with shortest round-trip floats.
pub fn to_csv_string(s: &TimeSeries) -> String {
    let mut out = String::from("date,value\n");
    for (d, v) in s.iter() {
        out.push_str(&format!("{},{}\n", d.format("%Y-%m-%d"), v));
    }
    out
}

pub fn write_csv(s: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_csv_string(s)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn daily(start: &str, values: &[f64]) -> TimeSeries {
        TimeSeries::from_values(Frequency::Daily, d(start), values.to_vec()).unwrap()
    }

    #[test]
    fn rejects_unsorted_and_non_finite() {
        assert!(TimeSeries::new(Frequency::Daily, vec![(d("2011-01-02"), 1.0), (d("2011-01-01"), 2.0)]).is_err());
        assert!(TimeSeries::new(Frequency::Daily, vec![(d("2011-01-01"), f64::NAN)]).is_err());
        assert!(TimeSeries::new(Frequency::Weekly, vec![(d("2011-01-01"), 1.0), (d("2011-01-03"), 2.0)]).is_err());
    }

    #[test]
    fn fills_weekend() {
        // 2011-08-05 is a Friday.
        let s = TimeSeries::new(
            Frequency::Daily,
            vec![(d("2011-08-05"), 100.0), (d("2011-08-08"), 106.0)],
        )
        .unwrap();
        let f = fill_missing_linear(&s).unwrap();
        assert_eq!(f.values(), &[100.0, 102.0, 104.0, 106.0]);
        assert_eq!(f.dates()[1], d("2011-08-06"));
    }

    #[test]
    fn fill_midpoint_and_identity() {
        let s = TimeSeries::new(
            Frequency::Daily,
            vec![(d("2011-01-01"), 10.0), (d("2011-01-03"), 20.0)],
        )
        .unwrap();
        assert_eq!(fill_missing_linear(&s).unwrap().values(), &[10.0, 15.0, 20.0]);
        let full = daily("2011-01-01", &[1.0, 5.0, 2.0]);
        assert_eq!(fill_missing_linear(&full).unwrap(), full);
        assert!(fill_missing_linear(&daily("2011-01-01", &[1.0])).is_err());
    }

    #[test]
    fn log_returns() {
        let c = daily("2011-01-01", &[5.0; 4]);
        assert!(log_return(&c, 1).unwrap().values().iter().all(|v| *v == 0.0));
        let up = log_return(&daily("2011-01-01", &[100.0, 110.0]), 1).unwrap();
        assert!((up.values()[0] - 0.095_310_179_804_324_87).abs() < 1e-12);
        assert_eq!(up.dates(), &[d("2011-01-02")]);
        let down = log_return(&daily("2011-01-01", &[100.0, 50.0]), 1).unwrap();
        assert!((down.values()[0] + 0.693_147_180_559_945_3).abs() < 1e-12);
        assert!(log_return(&daily("2011-01-01", &[1.0, 2.0]), 2).is_err());
        assert!(matches!(
            log_return(&daily("2011-01-01", &[1.0, -2.0]), 1),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn log_transform_values() {
        let s = daily("2011-01-01", &[1.0, std::f64::consts::E]);
        let l = log_transform(&s).unwrap();
        assert_eq!(l.values()[0], 0.0);
        assert!((l.values()[1] - 1.0).abs() < 1e-15);
        let bad = daily("2011-01-01", &[1.0, 0.0]);
        match log_transform(&bad) {
            Err(Error::NonPositive { date, .. }) => assert_eq!(date, d("2011-01-02")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weekly_means() {
        // 2011-08-07 is a Sunday, so Sun..Sat is one Saturday-ending week.
        let s = daily("2011-08-07", &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let w = to_weekly_mean(&s, Weekday::Sat).unwrap();
        assert_eq!(w.values(), &[4.0]);
        assert_eq!(w.dates(), &[d("2011-08-13")]);
        assert_eq!(w.frequency(), Frequency::Weekly);

        let c = daily("2011-08-07", &[3.0; 7]);
        assert_eq!(to_weekly_mean(&c, Weekday::Sat).unwrap().values(), &[3.0]);

        let partial = TimeSeries::new(
            Frequency::Daily,
            vec![(d("2011-08-07"), 2.0), (d("2011-08-09"), 4.0), (d("2011-08-12"), 6.0)],
        )
        .unwrap();
        assert_eq!(to_weekly_mean(&partial, Weekday::Sat).unwrap().values(), &[4.0]);
    }

    #[test]
    fn week_ending_wraps() {
        assert_eq!(week_ending(d("2011-08-13"), Weekday::Sat), d("2011-08-13"));
        assert_eq!(week_ending(d("2011-08-14"), Weekday::Sat), d("2011-08-20"));
        assert_eq!(week_ending(d("2011-08-14"), Weekday::Fri), d("2011-08-19"));
    }

    #[test]
    fn standard_scores() {
        let s = daily("2011-01-01", &[1.0, 2.0, 3.0]);
        let (z, p) = standardize(&s, None).unwrap();
        assert_eq!(z.values(), &[-1.0, 0.0, 1.0]);
        assert_eq!(p, StandardizationParams { mean: 2.0, std: 1.0 });
        let ident = StandardizationParams::new(0.0, 1.0).unwrap();
        let (same, _) = standardize(&s, Some(ident)).unwrap();
        assert_eq!(same, s);
        assert!(matches!(
            standardize(&daily("2011-01-01", &[4.0; 3]), None),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn moving_averages() {
        let s = daily("2011-01-01", &[1.0, 1.0, 1.0, 7.0]);
        assert_eq!(moving_average(&s, 1).unwrap(), s);
        let m = moving_average(&s, 2).unwrap();
        assert_eq!(m.values(), &[1.0, 1.0, 4.0]);
        assert_eq!(m.first_date(), Some(d("2011-01-02")));
        assert!(moving_average(&s, 5).is_err());
    }

    #[test]
    fn alignment() {
        let a = daily("2011-01-01", &[1.0, 2.0, 3.0]);
        let b = daily("2011-01-02", &[20.0, 30.0]);
        let (a2, b2) = align(&a, &b).unwrap();
        assert_eq!(a2.values(), &[2.0, 3.0]);
        assert_eq!(b2, b);
        let (x, y) = align(&a, &a).unwrap();
        assert_eq!((x, y), (a.clone(), a.clone()));
        let far = daily("2012-01-01", &[1.0]);
        assert!(matches!(align(&a, &far), Err(Error::EmptyIntersection)));
    }

    #[test]
    fn inversion() {
        let s = daily("2011-01-01", &[1.0, -2.0]);
        assert_eq!(invert(&s).values(), &[-1.0, 2.0]);
        assert_eq!(invert(&invert(&s)), s);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = TimeSeries::new(
            Frequency::Weekly,
            vec![(d("2011-08-13"), 0.1), (d("2011-08-27"), 1e-17)],
        )
        .unwrap();
        write_csv(&s, &path).unwrap();
        assert_eq!(read_csv(&path, None).unwrap(), s);
        fs::write(&path, "date,value\n2011-01-01,1\n2011-01-02,x\n").unwrap();
        match read_csv(&path, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
