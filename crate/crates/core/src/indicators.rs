//! Daily sentiment indicators built from corpora: negative news sentiment,
//! the bullish share of bull/bear mentions, per-term message volumes, and
//! composites of term series.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{count_occurrences, token_ratio, tokenize, Corpus, Lexicon};
use crate::econometrics::correlation::{pearson, Correlation};
use crate::error::{Error, Result};
use crate::timeseries::{align_all, standardize, Frequency, TimeSeries};

pub const DEFAULT_BULL_TERM: &str = "bullish";
pub const DEFAULT_BEAR_TERM: &str = "bearish";
pub const DEFAULT_SELECTION_ALPHA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    /// Mean negative-token ratio of the day's headlines.
    Nns,
    /// Bullish share of bullish + bearish messages.
    Tis,
    /// Number of documents mentioning one term.
    TermVolume,
    /// Average of several term series.
    Composite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub series: TimeSeries,
    pub kind: IndicatorKind,
    /// Lexicon name or the terms the indicator was built from.
    pub meta: Vec<String>,
}

impl IndicatorSeries {
    fn checked(series: TimeSeries, kind: IndicatorKind, meta: Vec<String>) -> Self {
        debug_assert!(series.values().iter().all(|v| match kind {
            IndicatorKind::Nns | IndicatorKind::Tis => (0.0..=1.0).contains(v),
            IndicatorKind::TermVolume => *v >= 0.0 && v.fract() == 0.0,
            IndicatorKind::Composite => true,
        }));
        Self { series, kind, meta }
    }
}

fn check_window(from: NaiveDate, to: NaiveDate) -> Result<()> {
    if from > to {
        return Err(Error::InvalidInput(format!("empty date window {from}..{to}")));
    }
    Ok(())
}

/// Per-day mean negative ratio over documents dated that day; days without
/// documents are left out.
pub fn nns_daily(corpus: &Corpus, lex: &Lexicon, from: NaiveDate, to: NaiveDate) -> Result<IndicatorSeries> {
    check_window(from, to)?;
    let points = corpus
        .by_day(from, to)
        .into_iter()
        .map(|(day, docs)| {
            let total: f64 = docs.iter().map(|d| token_ratio(&d.tokens(), lex)).sum();
            (day, total / docs.len() as f64)
        })
        .collect();
    Ok(IndicatorSeries::checked(
        TimeSeries::new(Frequency::Daily, points)?,
        IndicatorKind::Nns,
        vec![lex.name().to_string()],
    ))
}

/// `N_bull / (N_bull + N_bear)` per day, counting documents that contain
/// each term. Days where neither term appears are left out.
pub fn tis_daily(
    corpus: &Corpus,
    bull_term: &str,
    bear_term: &str,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<IndicatorSeries> {
    check_window(from, to)?;
    let bull = tokenize(bull_term);
    let bear = tokenize(bear_term);
    if bull.is_empty() || bear.is_empty() {
        return Err(Error::InvalidTerm(format!("{bull_term:?} / {bear_term:?}")));
    }
    if bull == bear {
        return Err(Error::InvalidInput(format!(
            "bullish and bearish terms must differ (both {bull_term:?})"
        )));
    }
    let mut points = Vec::new();
    for (day, docs) in corpus.by_day(from, to) {
        let (mut n_bull, mut n_bear) = (0usize, 0usize);
        for doc in docs {
            let tokens = doc.tokens();
            n_bull += usize::from(count_occurrences(&tokens, &bull) > 0);
            n_bear += usize::from(count_occurrences(&tokens, &bear) > 0);
        }
        if n_bull + n_bear > 0 {
            points.push((day, n_bull as f64 / (n_bull + n_bear) as f64));
        }
    }
    Ok(IndicatorSeries::checked(
        TimeSeries::new(Frequency::Daily, points)?,
        IndicatorKind::Tis,
        vec![bull_term.to_string(), bear_term.to_string()],
    ))
}

/// Daily count of documents mentioning each term. A day with documents but
/// no mention is 0; a day without documents is absent.
pub fn term_volume_daily(
    corpus: &Corpus,
    terms: &Lexicon,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<BTreeMap<String, IndicatorSeries>> {
    check_window(from, to)?;
    let needles: Vec<(&str, Vec<String>)> = terms.terms().map(|t| (t, tokenize(t))).collect();
    let mut points: Vec<Vec<(NaiveDate, f64)>> = vec![Vec::new(); needles.len()];
    for (day, docs) in corpus.by_day(from, to) {
        let mut counts = vec![0usize; needles.len()];
        for doc in docs {
            let tokens = doc.tokens();
            for (c, (_, n)) in counts.iter_mut().zip(&needles) {
                *c += usize::from(count_occurrences(&tokens, n) > 0);
            }
        }
        for (p, c) in points.iter_mut().zip(counts) {
            p.push((day, c as f64));
        }
    }
    needles
        .into_iter()
        .zip(points)
        .map(|((term, _), pts)| {
            let series = TimeSeries::new(Frequency::Daily, pts)?;
            Ok((
                term.to_string(),
                IndicatorSeries::checked(series, IndicatorKind::TermVolume, vec![term.to_string()]),
            ))
        })
        .collect()
}

/// Treatment of each input before a composite is averaged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rescale {
    /// Average raw values.
    #[default]
    None,
    /// Convert each input to standard scores over the common dates first.
    StandardScore,
}

/// Pointwise mean of the inputs over the dates they all share.
pub fn composite_mean(series: &[TimeSeries]) -> Result<TimeSeries> {
    composite_mean_with(series, Rescale::None)
}

pub fn composite_mean_with(series: &[TimeSeries], rescale: Rescale) -> Result<TimeSeries> {
    if series.is_empty() {
        return Err(Error::InvalidInput("composite needs at least one series".into()));
    }
    if series.iter().all(TimeSeries::is_empty) {
        return Err(Error::EmptyIntersection);
    }
    let refs: Vec<&TimeSeries> = series.iter().collect();
    let mut aligned = align_all(&refs)?;
    if rescale == Rescale::StandardScore {
        aligned = aligned
            .iter()
            .map(|s| standardize(s, None).map(|(z, _)| z))
            .collect::<Result<_>>()?;
    }
    let k = aligned.len() as f64;
    let n = aligned[0].len();
    let values = (0..n)
        .map(|i| aligned.iter().map(|s| s.values()[i]).sum::<f64>() / k)
        .collect();
    TimeSeries::from_parts(aligned[0].frequency(), aligned[0].dates().to_vec(), values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSelection {
    /// Selected terms, alphabetical.
    pub terms: Vec<String>,
    /// Correlation of every candidate with the target; terms whose series is
    /// constant are omitted.
    pub correlations: BTreeMap<String, Correlation>,
    pub composite: TimeSeries,
}

/// Keeps terms whose series correlates with `target` at `p < alpha` (the
/// `top_k` strongest by |r| when given, ties alphabetical) and averages them.
pub fn select_terms_by_correlation(
    series_map: &BTreeMap<String, TimeSeries>,
    target: &TimeSeries,
    alpha: f64,
    top_k: Option<usize>,
    rescale: Rescale,
) -> Result<TermSelection> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if top_k == Some(0) {
        return Err(Error::InvalidInput("top_k must be positive".into()));
    }
    let mut correlations = BTreeMap::new();
    for (term, s) in series_map {
        if s.dates() != target.dates() {
            return Err(Error::InvalidSeries(format!(
                "series for {term:?} is not aligned with the target"
            )));
        }
        match pearson(s, target) {
            Ok(c) => {
                correlations.insert(term.clone(), c);
            }
            Err(Error::ZeroVariance) => {}
            Err(e) => return Err(e),
        }
    }
    let mut passing: Vec<(&String, &Correlation)> =
        correlations.iter().filter(|(_, c)| c.p_value < alpha).collect();
    // Stable sort keeps alphabetical order among equal |r|.
    passing.sort_by(|a, b| b.1.coefficient.abs().total_cmp(&a.1.coefficient.abs()));
    if let Some(k) = top_k {
        passing.truncate(k);
    }
    if passing.is_empty() {
        return Err(Error::NoTermsSelected { alpha });
    }
    let mut terms: Vec<String> = passing.into_iter().map(|(t, _)| t.clone()).collect();
    terms.sort();
    let chosen: Vec<TimeSeries> = terms.iter().map(|t| series_map[t].clone()).collect();
    let composite = composite_mean_with(&chosen, rescale)?;
    Ok(TermSelection {
        terms,
        correlations,
        composite,
    })
}
