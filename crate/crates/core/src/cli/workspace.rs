//! Loads inputs named in a [`RunConfig`], builds indicators and resolves
//! named series through their transform chains.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use log::{info, warn};

use super::config::{RunConfig, Transform, INDICATOR_PREFIX};
use crate::corpus::{load_corpus, load_lexicon, term_frequency_report};
use crate::error::{Error, Result};
use crate::indicators::{
    composite_mean_with, nns_daily, select_terms_by_correlation, term_volume_daily, tis_daily,
    IndicatorSeries, TermSelection,
};
use crate::timeseries::{
    align_all, fill_missing_linear, invert, log_return, log_transform, moving_average, read_csv,
    standardize, to_weekly_mean, Frequency, TimeSeries,
};

#[derive(Clone, Debug, Default)]
pub struct IndicatorSet {
    pub news_documents: usize,
    pub message_documents: usize,
    pub nns: Option<IndicatorSeries>,
    pub tis: Option<IndicatorSeries>,
    pub volumes: BTreeMap<String, IndicatorSeries>,
    /// Daily mean of all term volumes.
    pub tv_fst: Option<TimeSeries>,
    /// Mean of the per-term weekly means.
    pub tv_fst_weekly: Option<TimeSeries>,
    pub selection: Option<TermSelection>,
    pub negative_term_counts: Vec<(String, usize)>,
}

impl IndicatorSet {
    pub fn get(&self, name: &str) -> Option<TimeSeries> {
        match name {
            "nns" => self.nns.as_ref().map(|i| i.series.clone()),
            "tis" => self.tis.as_ref().map(|i| i.series.clone()),
            "tv_fst" => self.tv_fst.clone(),
            "tv_fst_weekly" => self.tv_fst_weekly.clone(),
            "tv_fst_selected" => self.selection.as_ref().map(|s| s.composite.clone()),
            _ => name
                .strip_prefix("volume:")
                .and_then(|t| self.volumes.get(t))
                .map(|i| i.series.clone()),
        }
    }
}

pub struct Workspace<'a> {
    pub config: &'a RunConfig,
    indicators: Option<IndicatorSet>,
    cache: RefCell<BTreeMap<String, TimeSeries>>,
}

impl<'a> Workspace<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Self {
            config,
            indicators: None,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    /// Builds indicators when any configured series refers to one, or when
    /// `force` is set.
    pub fn prepare_indicators(&mut self, force: bool) -> Result<()> {
        let needed = self
            .config
            .series
            .values()
            .any(|s| s.source.as_deref().is_some_and(|s| s.starts_with(INDICATOR_PREFIX)));
        if self.indicators.is_none() && (force || needed) && self.config.indicators.is_some() {
            let set = self.build_indicators().map_err(|e| Error::stage("indicators", e))?;
            self.indicators = Some(set);
        }
        Ok(())
    }

    pub fn indicators(&self) -> Option<&IndicatorSet> {
        self.indicators.as_ref()
    }

    fn build_indicators(&self) -> Result<IndicatorSet> {
        let cfg = self.config.indicators.as_ref().expect("checked by caller");
        let anchor = self.config.anchor()?;
        let (from, to) = (cfg.from, cfg.to);
        let mut set = IndicatorSet::default();

        if let (Some(news), Some(lex)) = (&cfg.news, &cfg.negative_lexicon) {
            let corpus = load_corpus(self.config.resolve(news))?;
            let lex = load_lexicon(self.config.resolve(lex))?;
            if corpus.is_empty() {
                warn!("news corpus {} is empty", news.display());
            }
            set.news_documents = corpus.between(from, to).len();
            set.nns = Some(nns_daily(&corpus, &lex, from, to)?);
            set.negative_term_counts = term_frequency_report(&corpus, &lex, from, to);
        }

        if let Some(messages) = &cfg.messages {
            let corpus = load_corpus(self.config.resolve(messages))?;
            if corpus.is_empty() {
                warn!("message corpus {} is empty", messages.display());
            }
            set.message_documents = corpus.between(from, to).len();
            set.tis = Some(tis_daily(&corpus, &cfg.bull_term, &cfg.bear_term, from, to)?);
            if let Some(terms) = &cfg.terms {
                let lex = load_lexicon(self.config.resolve(terms))?;
                set.volumes = term_volume_daily(&corpus, &lex, from, to)?;
                let daily: Vec<TimeSeries> = set.volumes.values().map(|i| i.series.clone()).collect();
                if daily.iter().all(TimeSeries::is_empty) {
                    warn!("no message documents between {from} and {to}; term volume composites are empty");
                    set.tv_fst = Some(TimeSeries::empty(Frequency::Daily));
                    set.tv_fst_weekly = Some(TimeSeries::empty(Frequency::Weekly));
                } else {
                    set.tv_fst = Some(composite_mean_with(&daily, cfg.rescale)?);
                    let weekly: Vec<TimeSeries> = daily
                        .iter()
                        .map(|s| to_weekly_mean(s, anchor))
                        .collect::<Result<_>>()?;
                    set.tv_fst_weekly = Some(composite_mean_with(&weekly, cfg.rescale)?);
                }
                if let Some(sel) = &cfg.selection {
                    if set.tv_fst.as_ref().is_some_and(TimeSeries::is_empty) {
                        warn!("skipping term selection: no term volumes");
                    } else {
                        set.selection = Some(self.select_terms(&set.volumes, sel)?);
                    }
                }
            }
        }
        Ok(set)
    }

    fn select_terms(
        &self,
        volumes: &BTreeMap<String, IndicatorSeries>,
        sel: &super::config::SelectionConfig,
    ) -> Result<TermSelection> {
        let target = self.series(&sel.target)?;
        let filled: Vec<(String, TimeSeries)> = volumes
            .iter()
            .map(|(t, i)| Ok((t.clone(), fill_if_needed(&i.series, &format!("volume:{t}"))?)))
            .collect::<Result<_>>()?;
        let mut all: Vec<&TimeSeries> = vec![&target];
        all.extend(filled.iter().map(|(_, s)| s));
        let aligned = align_all(&all)?;
        let map: BTreeMap<String, TimeSeries> = filled
            .iter()
            .map(|(t, _)| t.clone())
            .zip(aligned[1..].iter().cloned())
            .collect();
        let cfg = self.config.indicators.as_ref().expect("indicators configured");
        select_terms_by_correlation(&map, &aligned[0], sel.alpha, sel.top_k, cfg.rescale)
    }

    /// Resolves a configured series by name.
    pub fn series(&self, name: &str) -> Result<TimeSeries> {
        if let Some(s) = self.cache.borrow().get(name) {
            return Ok(s.clone());
        }
        let s = self
            .resolve(name, &mut BTreeSet::new())
            .map_err(|e| Error::stage(format!("series {name:?}"), e))?;
        self.cache.borrow_mut().insert(name.to_string(), s.clone());
        Ok(s)
    }

    fn resolve(&self, name: &str, seen: &mut BTreeSet<String>) -> Result<TimeSeries> {
        if !seen.insert(name.to_string()) {
            return Err(Error::Config(format!("series {name:?} depends on itself")));
        }
        let cfg = self
            .config
            .series
            .get(name)
            .ok_or_else(|| Error::UnknownSeries(name.to_string()))?;
        let mut s = match (&cfg.path, &cfg.source) {
            (Some(p), _) => read_csv(self.config.resolve(p), cfg.frequency)?,
            (None, Some(src)) => match src.strip_prefix(INDICATOR_PREFIX) {
                Some(ind) => self
                    .indicators
                    .as_ref()
                    .and_then(|set| set.get(ind))
                    .ok_or_else(|| Error::Config(format!("indicator {ind:?} is not available")))?,
                None => match self.cache.borrow().get(src.as_str()).cloned() {
                    Some(cached) => cached,
                    None => self.resolve(src, seen)?,
                },
            },
            (None, None) => return Err(Error::Config(format!("series {name:?} has no input"))),
        };
        if cfg.fill {
            s = fill_if_needed(&s, name)?;
        }
        let anchor = self.config.anchor()?;
        for t in &cfg.transforms {
            s = match Transform::parse(t)? {
                Transform::Fill => fill_if_needed(&s, name)?,
                Transform::Log => log_transform(&s)?,
                Transform::LogReturn => log_return(&s, 1)?,
                Transform::Weekly => to_weekly_mean(&s, anchor)?,
                Transform::Standardize => standardize(&s, None)?.0,
                Transform::Invert => invert(&s),
                Transform::MovingAverage(w) => moving_average(&s, w)?,
            };
        }
        Ok(s)
    }
}

fn fill_if_needed(s: &TimeSeries, name: &str) -> Result<TimeSeries> {
    let gaps = s.gap_count();
    if s.frequency() != Frequency::Daily || gaps == 0 || s.len() < 2 {
        return Ok(s.clone());
    }
    info!("{name}: filled {gaps} missing days by linear interpolation");
    fill_missing_linear(s)
}
