//! A small self-consistent dataset (corpora, lexicons, market series and a
//! run config) driven by one latent mood process, for trying the pipeline
//! end to end.

use chrono::{Datelike, Days, NaiveDate, Weekday};

use crate::corpus::{write_corpus, Lexicon};
use crate::error::{Error, Result};
use crate::synth::{gen_corpus, Prng};
use crate::timeseries::{to_csv_string, week_ending, Frequency, TimeSeries};

use super::commands::Outputs;

pub const NEGATIVE_TERMS: &[&str] = &[
    "bankruptcy", "collapse", "crash", "crisis", "cut", "decline", "default", "deficit",
    "downgrade", "fall", "fear", "layoffs", "loss", "losses", "panic", "plunge", "recession",
    "selloff", "slump", "weak",
];

pub const FINANCIAL_TERMS: &[&str] = &[
    "djia", "dow", "dow jones", "dow jones industrial average", "bearish", "bear market",
    "best stock", "bullish", "bull market", "finance", "finance news", "financial news",
    "financial market", "long stock", "sp500", "stock", "stock market", "stock decline",
    "stock fall", "stock market crash", "stock market news", "stock market today", "stock price",
    "stock to buy", "wall street", "wall street news today",
];

const START: NaiveDate = match NaiveDate::from_ymd_opt(2010, 7, 4) {
    Some(d) => d,
    None => panic!("valid date"),
};

pub const DEMO_DAYS: usize = 300;

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

fn is_trading_day(d: NaiveDate) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

fn series(points: Vec<(NaiveDate, f64)>, freq: Frequency) -> Result<TimeSeries> {
    TimeSeries::new(freq, points)
}

/// Generates the demo inputs; the returned files are relative to one directory.
pub fn demo_dataset(seed: u64) -> Result<Outputs> {
    let mut rng = Prng::new(seed);
    let days: Vec<NaiveDate> = (0..DEMO_DAYS as u64).map(|i| START + Days::new(i)).collect();

    let mut mood = Vec::with_capacity(DEMO_DAYS);
    let mut m = 0.0;
    for _ in 0..DEMO_DAYS {
        m = 0.85 * m + 0.5 * rng.normal();
        mood.push(m);
    }

    let daily = |f: &dyn Fn(usize) -> f64| -> Result<TimeSeries> {
        TimeSeries::from_parts(Frequency::Daily, days.clone(), (0..DEMO_DAYS).map(f).collect())
    };
    let bull = daily(&|t| logistic(1.2 * mood[t]))?;
    let news_neg = daily(&|t| 0.04 + 0.2 * logistic(-1.5 * mood[t]))?;
    let mention = daily(&|t| 0.08 + 0.25 * logistic(-1.5 * mood[t]))?;
    let half = daily(&|_| 0.5)?;

    let negative = Lexicon::new("negative", NEGATIVE_TERMS.iter().copied())?;
    let terms = Lexicon::new("terms", FINANCIAL_TERMS.iter().copied())?;
    let news = gen_corpus(5, &half, &negative, &news_neg, rng.next_u64())?;
    let messages = gen_corpus(20, &bull, &terms, &mention, rng.next_u64())?;

    // Market series: trading days only, except the weekly search index.
    let mut djia = Vec::new();
    let mut vix = Vec::new();
    let mut volume = Vec::new();
    let mut dsi = Vec::new();
    let mut log_price = libm::log(10_000.0);
    for t in 0..DEMO_DAYS {
        let prev = if t > 0 { mood[t - 1] } else { 0.0 };
        log_price += 0.006 * prev + 0.01 * rng.normal();
        let vix_t = 20.0 * libm::exp(-0.25 * mood[t] + 0.05 * rng.normal());
        let vol_t = 4.0e9 * libm::exp(-0.2 * prev + 0.1 * rng.normal());
        let dsi_t = (100.0 * logistic(1.2 * mood[t]) + 5.0 * rng.normal()).clamp(1.0, 99.0);
        if is_trading_day(days[t]) {
            djia.push((days[t], libm::exp(log_price)));
            vix.push((days[t], vix_t));
            volume.push((days[t], vol_t));
            dsi.push((days[t], dsi_t));
        }
    }
    let mut gis: Vec<(NaiveDate, f64)> = Vec::new();
    let mut week_sum = 0.0;
    let mut week_n = 0;
    for t in 0..DEMO_DAYS {
        week_sum += -mood[t];
        week_n += 1;
        if week_ending(days[t], Weekday::Sat) == days[t] {
            let v = (50.0 + 15.0 * week_sum / week_n as f64 + 3.0 * rng.normal()).max(1.0);
            gis.push((days[t], v));
            week_sum = 0.0;
            week_n = 0;
        }
    }

    let dir = tempdir_name(seed);
    let mut out = Outputs::default();
    let corpus_text = |c: &crate::corpus::Corpus, name: &str| -> Result<String> {
        let path = std::env::temp_dir().join(format!("{dir}-{name}"));
        write_corpus(c, &path)?;
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let _ = std::fs::remove_file(&path);
        Ok(text)
    };
    out.add("news.jsonl", corpus_text(&news, "news.jsonl")?);
    out.add("messages.tsv", corpus_text(&messages, "messages.tsv")?);
    out.add("negative.txt", lexicon_file("negative news terms", NEGATIVE_TERMS));
    out.add("terms.txt", lexicon_file("financial search terms", FINANCIAL_TERMS));
    out.add("djia.csv", to_csv_string(&series(djia, Frequency::Daily)?));
    out.add("vix.csv", to_csv_string(&series(vix, Frequency::Daily)?));
    out.add("volume.csv", to_csv_string(&series(volume, Frequency::Daily)?));
    out.add("dsi.csv", to_csv_string(&series(dsi, Frequency::Daily)?));
    out.add("gis.csv", to_csv_string(&series(gis, Frequency::Weekly)?));
    out.add("finsent.toml", demo_config(days[0], days[DEMO_DAYS - 1]));
    Ok(out)
}

fn tempdir_name(seed: u64) -> String {
    format!("finsent-demo-{}-{seed}", std::process::id())
}

fn lexicon_file(title: &str, terms: &[&str]) -> String {
    let mut s = format!("# {title}\n");
    for t in terms {
        s.push_str(t);
        s.push('\n');
    }
    s
}

fn demo_config(from: NaiveDate, to: NaiveDate) -> String {
    format!(
        r#"# Demo run: weekly search-volume analysis and daily sentiment analysis.
out = "out"
week_anchor = "sat"

[indicators]
from = "{from}"
to = "{to}"
news = "news.jsonl"
negative_lexicon = "negative.txt"
messages = "messages.tsv"
terms = "terms.txt"

[indicators.selection]
target = "djia_return"
alpha = 0.01

# Raw inputs (daily series are gap-filled over weekends by default).
[series.djia]
path = "djia.csv"

[series.vix]
path = "vix.csv"

[series.volume]
path = "volume.csv"

[series.dsi]
path = "dsi.csv"

[series.gis]
path = "gis.csv"

# Daily analysis inputs.
[series.djia_return]
source = "djia"
transforms = ["log_return"]

[series.djia_log]
source = "djia"
transforms = ["log"]

[series.tis]
source = "indicator:tis"

[series.nns]
source = "indicator:nns"

[series.tv_fst]
source = "indicator:tv_fst"

[series.tv_fst_selected]
source = "indicator:tv_fst_selected"

# Weekly analysis inputs, all on log scale.
[series.djia_w]
source = "djia"
transforms = ["weekly", "log"]

[series.vix_w]
source = "vix"
transforms = ["weekly", "log"]

[series.volume_w]
source = "volume"
transforms = ["weekly", "log"]

[series.gis_log]
source = "gis"
transforms = ["log"]

[[correlate]]
name = "weekly_search"
pairs = [["gis_log", "djia_w"], ["gis_log", "vix_w"], ["gis_log", "volume_w"]]

[[correlate]]
name = "daily_sentiment"
pairs = [
    ["tis", "djia_return"], ["nns", "djia_return"], ["tv_fst", "djia_return"],
    ["tv_fst_selected", "djia_return"], ["dsi", "djia_return"],
    ["tis", "vix"], ["nns", "vix"], ["tv_fst", "vix"], ["dsi", "vix"],
]

[[ccf]]
name = "djia_vs_search"
x = "djia_w"
y = "gis_log"
max_lag = 4

[[ccf]]
name = "vix_vs_search"
x = "vix_w"
y = "gis_log"
max_lag = 4

[[granger]]
name = "weekly_search"
pairs = [["vix_w", "gis_log"], ["djia_w", "gis_log"], ["volume_w", "gis_log"]]
lags = [1, 2, 3]

[[granger]]
name = "daily_sentiment"
pairs = [["djia_return", "tis"], ["djia_return", "nns"], ["djia_return", "dsi"], ["djia_return", "tv_fst_selected"]]
lags = [1, 2, 3, 4, 5]

[[regress]]
name = "daily_returns"
target = "djia_return"
exogenous = ["tis", "nns", "dsi", "vix", "tv_fst_selected"]
n_lags = 7

[[forecast]]
name = "weekly_djia"
target = "djia_w"
exogenous = ["gis_log"]
n_lags = 3
test_window = 20

[[forecast]]
name = "weekly_vix"
target = "vix_w"
exogenous = ["gis_log"]
n_lags = 3
test_window = 20

[[forecast]]
name = "daily_djia"
target = "djia_log"
exogenous = ["tis", "nns", "tv_fst", "dsi"]
n_lags = 7
test_window = 30
"#
    )
}
