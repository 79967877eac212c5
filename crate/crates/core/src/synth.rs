//! Seeded synthetic data with known structure: lead-lag coupled series and
//! corpora with prescribed bullish and negative-word rates.
//!
//! The random stream is xoshiro256** seeded by expanding the 64-bit seed with
//! SplitMix64, so any implementation of those two published generators
//! reproduces the data bit for bit. Uniforms take the top 53 bits of each
//! draw; normals come from the Abramowitz–Stegun 26.2.23 rational
//! approximation to the inverse normal CDF (absolute error below 4.5e-4).

use chrono::NaiveDate;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Corpus, Document, Lexicon};
use crate::error::{Error, Result};
use crate::indicators::{DEFAULT_BEAR_TERM, DEFAULT_BULL_TERM};
use crate::timeseries::{Frequency, TimeSeries};

/// First date of every generated series.
pub const SYNTH_START: NaiveDate = match NaiveDate::from_ymd_opt(2010, 1, 1) {
    Some(d) => d,
    None => panic!("valid date"),
};

/// Tokens per generated document besides the bullish/bearish tag.
pub const BODY_TOKENS: usize = 9;

const NEUTRAL_WORDS: [&str; 16] = [
    "market", "shares", "today", "trading", "report", "investors", "index", "session",
    "company", "quarter", "analysts", "futures", "sector", "price", "week", "update",
];

pub struct Prng(Xoshiro256StarStar);

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1)`.
    pub fn open_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        inverse_normal_cdf(self.open_uniform())
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn index(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}

/// Abramowitz–Stegun 26.2.23 approximation to the standard normal quantile.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const C: [f64; 3] = [2.515_517, 0.802_853, 0.010_328];
    const D: [f64; 3] = [1.432_788, 0.189_269, 0.001_308];
    let upper = |q: f64| {
        let t = libm::sqrt(-2.0 * libm::log(q));
        t - (C[0] + C[1] * t + C[2] * t * t) / (1.0 + D[0] * t + D[1] * t * t + D[2] * t * t * t)
    };
    if p < 0.5 {
        -upper(p)
    } else {
        upper(1.0 - p)
    }
}

/// `y[t] = coupling * x[t - lag] + noise_std * e[t]` over white-noise `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarSpec {
    pub coupling: f64,
    pub lag: usize,
    pub noise_std: f64,
    pub length: usize,
    pub seed: u64,
}

impl VarSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lag == 0 {
            return Err(Error::InvalidInput("coupling lag must be positive".into()));
        }
        if self.length <= 10 * self.lag {
            return Err(Error::InvalidInput(format!(
                "length {} must exceed ten times the lag {}",
                self.length, self.lag
            )));
        }
        if !(self.noise_std > 0.0) || !self.noise_std.is_finite() {
            return Err(Error::InvalidInput("noise_std must be positive".into()));
        }
        if !self.coupling.is_finite() {
            return Err(Error::InvalidInput("coupling must be finite".into()));
        }
        Ok(())
    }
}

/// Daily series from [`SYNTH_START`]: `x` is standard white noise, then the
/// noise of `y` is drawn from the same stream. Before `lag` observations of
/// `x` exist, `y` is noise only.
pub fn gen_coupled_pair(spec: &VarSpec) -> Result<(TimeSeries, TimeSeries)> {
    spec.validate()?;
    let mut rng = Prng::new(spec.seed);
    let x: Vec<f64> = (0..spec.length).map(|_| rng.normal()).collect();
    let y: Vec<f64> = (0..spec.length)
        .map(|t| {
            let signal = if t >= spec.lag { spec.coupling * x[t - spec.lag] } else { 0.0 };
            signal + spec.noise_std * rng.normal()
        })
        .collect();
    Ok((
        TimeSeries::from_values(Frequency::Daily, SYNTH_START, x)?,
        TimeSeries::from_values(Frequency::Daily, SYNTH_START, y)?,
    ))
}

/// Expected daily negative ratio of [`gen_corpus`] output for a per-token
/// lexicon probability `neg_prob`.
pub fn expected_nns(neg_prob: f64) -> f64 {
    BODY_TOKENS as f64 * neg_prob / (BODY_TOKENS as f64 + 1.0)
}

/// Generates `daily_doc_count` documents for every date of the probability
/// series. Each document starts with "bullish" (probability from
/// `bull_prob_series`) or "bearish", followed by [`BODY_TOKENS`] words, each a
/// lexicon term with probability from `neg_prob_series` and a neutral word
/// otherwise. The expected TIS is the bullish probability and the expected
/// NNS is [`expected_nns`].
pub fn gen_corpus(
    daily_doc_count: usize,
    bull_prob_series: &TimeSeries,
    lexicon: &Lexicon,
    neg_prob_series: &TimeSeries,
    seed: u64,
) -> Result<Corpus> {
    if bull_prob_series.dates() != neg_prob_series.dates() {
        return Err(Error::InvalidSeries(
            "bullish and negative probability series must share dates".into(),
        ));
    }
    let in_unit = |s: &TimeSeries| s.values().iter().all(|p| (0.0..=1.0).contains(p));
    if !in_unit(bull_prob_series) || !in_unit(neg_prob_series) {
        return Err(Error::InvalidInput("probabilities must lie in [0, 1]".into()));
    }
    let negative: Vec<&str> = lexicon
        .terms()
        .filter(|t| tokenize(t).len() == 1 && *t != DEFAULT_BULL_TERM && *t != DEFAULT_BEAR_TERM)
        .collect();
    if negative.is_empty() && neg_prob_series.values().iter().any(|p| *p > 0.0) {
        return Err(Error::InvalidInput(format!(
            "lexicon {} has no single-word terms to inject",
            lexicon.name()
        )));
    }
    let neutral: Vec<&str> = NEUTRAL_WORDS
        .iter()
        .copied()
        .filter(|w| !lexicon.contains(w))
        .collect();
    if neutral.is_empty() {
        return Err(Error::InvalidInput("lexicon covers every neutral filler word".into()));
    }

    let mut rng = Prng::new(seed);
    let mut docs = Vec::with_capacity(daily_doc_count * bull_prob_series.len());
    for ((date, p_bull), p_neg) in bull_prob_series.iter().zip(neg_prob_series.values()) {
        for _ in 0..daily_doc_count {
            let mut words = Vec::with_capacity(BODY_TOKENS + 1);
            words.push(if rng.bernoulli(p_bull) { DEFAULT_BULL_TERM } else { DEFAULT_BEAR_TERM });
            for _ in 0..BODY_TOKENS {
                let word = if rng.bernoulli(*p_neg) {
                    negative[rng.index(negative.len())]
                } else {
                    neutral[rng.index(neutral.len())]
                };
                words.push(word);
            }
            docs.push(Document::new(date, words.join(" "), Some("synth".into()))?);
        }
    }
    Ok(Corpus::new(docs))
}
