//! Declarative run configuration (TOML).
//!
//! Relative paths are resolved against the directory holding the config file.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, Weekday};
use serde::Deserialize;

use crate::econometrics::CcfMode;
use crate::error::{Error, Result};
use crate::indicators::{Rescale, DEFAULT_BEAR_TERM, DEFAULT_BULL_TERM, DEFAULT_SELECTION_ALPHA};
use crate::timeseries::{parse_weekday, Frequency};

pub const INDICATOR_PREFIX: &str = "indicator:";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_anchor")]
    pub week_anchor: String,
    #[serde(default)]
    pub indicators: Option<IndicatorConfig>,
    #[serde(default)]
    pub series: BTreeMap<String, SeriesConfig>,
    #[serde(default)]
    pub correlate: Vec<CorrelateConfig>,
    #[serde(default)]
    pub ccf: Vec<CcfConfig>,
    #[serde(default)]
    pub granger: Vec<GrangerConfig>,
    #[serde(default)]
    pub regress: Vec<RegressConfig>,
    #[serde(default)]
    pub forecast: Vec<ForecastConfig>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_anchor() -> String {
    "sat".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorConfig {
    pub from: NaiveDate,
    pub to: NaiveDate,
    /// Headline corpus scored against `negative_lexicon`.
    #[serde(default)]
    pub news: Option<PathBuf>,
    #[serde(default)]
    pub negative_lexicon: Option<PathBuf>,
    /// Message corpus for the bullish share and term volumes.
    #[serde(default)]
    pub messages: Option<PathBuf>,
    #[serde(default)]
    pub terms: Option<PathBuf>,
    #[serde(default = "default_bull")]
    pub bull_term: String,
    #[serde(default = "default_bear")]
    pub bear_term: String,
    #[serde(default)]
    pub rescale: Rescale,
    #[serde(default)]
    pub selection: Option<SelectionConfig>,
}

fn default_bull() -> String {
    DEFAULT_BULL_TERM.into()
}

fn default_bear() -> String {
    DEFAULT_BEAR_TERM.into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    /// Series the term volumes are correlated with.
    pub target: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub top_k: Option<usize>,
}

fn default_alpha() -> f64 {
    DEFAULT_SELECTION_ALPHA
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    /// `date,value` CSV file.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Another series name, or `indicator:<name>`.
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub frequency: Option<Frequency>,
    /// Linear gap filling of daily series before the transforms.
    #[serde(default = "default_true")]
    pub fill: bool,
    #[serde(default)]
    pub transforms: Vec<String>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    Fill,
    Log,
    LogReturn,
    Weekly,
    Standardize,
    Invert,
    MovingAverage(usize),
}

impl Transform {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "fill" => Transform::Fill,
            "log" => Transform::Log,
            "log_return" => Transform::LogReturn,
            "weekly" => Transform::Weekly,
            "standardize" => Transform::Standardize,
            "invert" => Transform::Invert,
            _ => match s.strip_prefix("ma:") {
                Some(n) => Transform::MovingAverage(n.parse().map_err(|_| {
                    Error::Config(format!("bad moving-average window in {s:?}"))
                })?),
                None => return Err(Error::Config(format!("unknown transform {s:?}"))),
            },
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelateConfig {
    pub name: String,
    pub pairs: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcfConfig {
    pub name: String,
    pub x: String,
    pub y: String,
    pub max_lag: usize,
    #[serde(default)]
    pub mode: CcfMode,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrangerConfig {
    pub name: String,
    pub pairs: Vec<[String; 2]>,
    pub lags: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressConfig {
    pub name: String,
    pub target: String,
    pub exogenous: Vec<String>,
    pub n_lags: usize,
    /// Convert every input to standard scores over the common dates.
    #[serde(default = "default_true")]
    pub standardize: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastConfig {
    pub name: String,
    pub target: String,
    pub exogenous: Vec<String>,
    pub n_lags: usize,
    pub test_window: usize,
    #[serde(default)]
    pub standardize: bool,
    /// Score on the target as configured, or (`raw`) undo a final `log`
    /// transform before computing MAPE.
    #[serde(default)]
    pub mape_scale: MapeScale,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapeScale {
    #[default]
    Transformed,
    Raw,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.validate()?;
        Ok(config)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn anchor(&self) -> Result<Weekday> {
        parse_weekday(&self.week_anchor)
    }

    /// Names the indicator stage can provide (without the prefix).
    pub fn indicator_names(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        if let Some(ind) = &self.indicators {
            if ind.news.is_some() && ind.negative_lexicon.is_some() {
                names.insert("nns".to_string());
            }
            if ind.messages.is_some() {
                names.insert("tis".to_string());
                if ind.terms.is_some() {
                    names.insert("tv_fst".to_string());
                    if ind.selection.is_some() {
                        names.insert("tv_fst_selected".to_string());
                    }
                }
            }
        }
        names
    }

    /// Checks everything that can be checked without reading data: paths
    /// exist, names resolve, transforms parse, parameters are in range.
    pub fn validate(&self) -> Result<()> {
        self.anchor()?;
        let check_path = |p: &Path, what: &str| -> Result<()> {
            let full = self.resolve(p);
            if full.exists() {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} {} does not exist", full.display())))
            }
        };
        if let Some(ind) = &self.indicators {
            if ind.from > ind.to {
                return Err(Error::Config(format!("indicators.from {} is after indicators.to {}", ind.from, ind.to)));
            }
            for (p, what) in [
                (&ind.news, "news corpus"),
                (&ind.negative_lexicon, "negative lexicon"),
                (&ind.messages, "message corpus"),
                (&ind.terms, "term lexicon"),
            ] {
                if let Some(p) = p {
                    check_path(p, what)?;
                }
            }
            if ind.news.is_some() != ind.negative_lexicon.is_some() {
                return Err(Error::Config("indicators.news and indicators.negative_lexicon go together".into()));
            }
            if let Some(sel) = &ind.selection {
                if ind.messages.is_none() || ind.terms.is_none() {
                    return Err(Error::Config("term selection needs indicators.messages and indicators.terms".into()));
                }
                if !(sel.alpha > 0.0 && sel.alpha < 1.0) {
                    return Err(Error::Config(format!("selection alpha {} outside (0, 1)", sel.alpha)));
                }
                if !self.series.contains_key(&sel.target) {
                    return Err(Error::Config(format!(
                        "selection target {:?} is not a configured series",
                        sel.target
                    )));
                }
                if self.depends_on_indicator(&sel.target, &mut BTreeSet::new())? {
                    return Err(Error::Config(format!(
                        "selection target {:?} cannot be derived from an indicator",
                        sel.target
                    )));
                }
            }
        }
        let indicators = self.indicator_names();
        for (name, s) in &self.series {
            match (&s.path, &s.source) {
                (Some(p), None) => check_path(p, &format!("series {name:?} file"))?,
                (None, Some(src)) => {
                    if let Some(ind) = src.strip_prefix(INDICATOR_PREFIX) {
                        if !indicators.contains(ind) && !ind.starts_with("volume:") {
                            return Err(Error::Config(format!(
                                "series {name:?} uses indicator {ind:?}, which the [indicators] section does not produce"
                            )));
                        }
                        if ind.starts_with("volume:") && !indicators.contains("tv_fst") {
                            return Err(Error::Config(format!(
                                "series {name:?} needs term volumes; configure indicators.messages and indicators.terms"
                            )));
                        }
                    } else if !self.series.contains_key(src) {
                        return Err(Error::Config(format!("series {name:?} has unknown source {src:?}")));
                    }
                }
                _ => {
                    return Err(Error::Config(format!(
                        "series {name:?} needs exactly one of `path` or `source`"
                    )))
                }
            }
            for t in &s.transforms {
                Transform::parse(t)?;
            }
            self.depends_on_indicator(name, &mut BTreeSet::new())?;
        }

        let known = |n: &str, ctx: &str| -> Result<()> {
            if self.series.contains_key(n) {
                Ok(())
            } else {
                Err(Error::Config(format!("{ctx} refers to unknown series {n:?}")))
            }
        };
        let mut names = BTreeSet::new();
        let mut unique = |kind: &str, n: &str| -> Result<()> {
            if n.is_empty() || n.contains(['/', '\\']) {
                return Err(Error::Config(format!("{kind} name {n:?} is not a valid file stem")));
            }
            if !names.insert(format!("{kind}/{n}")) {
                return Err(Error::Config(format!("duplicate {kind} name {n:?}")));
            }
            Ok(())
        };
        for c in &self.correlate {
            unique("correlate", &c.name)?;
            for [a, b] in &c.pairs {
                known(a, &format!("correlate {:?}", c.name))?;
                known(b, &format!("correlate {:?}", c.name))?;
            }
        }
        for c in &self.ccf {
            unique("ccf", &c.name)?;
            known(&c.x, &format!("ccf {:?}", c.name))?;
            known(&c.y, &format!("ccf {:?}", c.name))?;
            if c.max_lag == 0 {
                return Err(Error::Config(format!("ccf {:?}: max_lag must be positive", c.name)));
            }
        }
        for g in &self.granger {
            unique("granger", &g.name)?;
            if g.lags.is_empty() || g.lags.contains(&0) {
                return Err(Error::Config(format!("granger {:?}: lags must be positive", g.name)));
            }
            for [a, b] in &g.pairs {
                known(a, &format!("granger {:?}", g.name))?;
                known(b, &format!("granger {:?}", g.name))?;
            }
        }
        for r in &self.regress {
            unique("regress", &r.name)?;
            known(&r.target, &format!("regress {:?}", r.name))?;
            for e in &r.exogenous {
                known(e, &format!("regress {:?}", r.name))?;
            }
            if r.n_lags == 0 {
                return Err(Error::Config(format!("regress {:?}: n_lags must be positive", r.name)));
            }
        }
        for f in &self.forecast {
            unique("forecast", &f.name)?;
            known(&f.target, &format!("forecast {:?}", f.name))?;
            for e in &f.exogenous {
                known(e, &format!("forecast {:?}", f.name))?;
            }
            if f.mape_scale == MapeScale::Raw
                && self.series[&f.target].transforms.last().map(String::as_str) != Some("log")
            {
                return Err(Error::Config(format!(
                    "forecast {:?}: mape_scale = \"raw\" needs a target whose last transform is \"log\"",
                    f.name
                )));
            }
            if f.n_lags == 0 || f.test_window == 0 {
                return Err(Error::Config(format!(
                    "forecast {:?}: n_lags and test_window must be positive",
                    f.name
                )));
            }
        }
        Ok(())
    }

    /// Follows `source` links; fails on cycles.
    fn depends_on_indicator(&self, name: &str, seen: &mut BTreeSet<String>) -> Result<bool> {
        if !seen.insert(name.to_string()) {
            return Err(Error::Config(format!("series {name:?} depends on itself")));
        }
        let Some(s) = self.series.get(name) else {
            return Ok(false);
        };
        match &s.source {
            Some(src) if src.starts_with(INDICATOR_PREFIX) => Ok(true),
            Some(src) => self.depends_on_indicator(src, seen),
            None => Ok(false),
        }
    }
}
