//! One function per subcommand. Each returns its files as an [`Outputs`]
//! map so callers decide where (and whether) to write them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::{MapeScale, RunConfig};
use super::workspace::Workspace;
use crate::econometrics::{
    cross_correlation, granger_table, multiple_lagged_regression, pearson, Correlation,
};
use crate::error::{Error, Result};
use crate::forecast::{compare_models, ModelSpec};
use crate::report;
use crate::timeseries::{align, align_all, standardize, to_csv_string, TimeSeries};

/// Relative path → file contents, written in path order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outputs(pub BTreeMap<PathBuf, String>);

impl Outputs {
    pub fn add(&mut self, path: impl Into<PathBuf>, contents: impl Into<String>) {
        self.0.insert(path.into(), contents.into());
    }

    pub fn extend(&mut self, other: Outputs) {
        self.0.extend(other.0);
    }

    pub fn write_all(&self, dir: &Path) -> Result<()> {
        for (rel, contents) in &self.0 {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results serialize");
    s.push('\n');
    s
}

fn slug(term: &str) -> String {
    term.chars()
        .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

fn series_summary(s: &TimeSeries) -> serde_json::Value {
    json!({
        "frequency": s.frequency(),
        "points": s.len(),
        "first": s.first_date(),
        "last": s.last_date(),
        "missing_days": s.gap_count(),
    })
}

pub fn cmd_indicators(ws: &mut Workspace) -> Result<Outputs> {
    if ws.config.indicators.is_none() {
        return Err(Error::Config("no [indicators] section in the config".into()));
    }
    ws.prepare_indicators(true)?;
    let set = ws.indicators().expect("indicators prepared");
    let mut out = Outputs::default();
    let mut summary = BTreeMap::new();
    let mut emit = |name: String, s: &TimeSeries, out: &mut Outputs| {
        summary.insert(name.clone(), series_summary(s));
        out.add(format!("indicators/{name}.csv"), to_csv_string(s));
    };
    if let Some(nns) = &set.nns {
        emit("nns".into(), &nns.series, &mut out);
    }
    if let Some(tis) = &set.tis {
        emit("tis".into(), &tis.series, &mut out);
    }
    for (term, v) in &set.volumes {
        emit(format!("volume_{}", slug(term)), &v.series, &mut out);
    }
    if let Some(s) = &set.tv_fst {
        emit("tv_fst".into(), s, &mut out);
    }
    if let Some(s) = &set.tv_fst_weekly {
        emit("tv_fst_weekly".into(), s, &mut out);
    }
    if let Some(sel) = &set.selection {
        emit("tv_fst_selected".into(), &sel.composite, &mut out);
    }
    if !set.negative_term_counts.is_empty() {
        let mut csv = String::from("term,count\n");
        for (t, c) in &set.negative_term_counts {
            csv.push_str(&format!("{t},{c}\n"));
        }
        out.add("indicators/negative_term_frequencies.csv", csv);
    }
    let manifest = json!({
        "documents": { "news": set.news_documents, "messages": set.message_documents },
        "indicators": summary,
        "selection": set.selection.as_ref().map(|s| json!({
            "terms": s.terms,
            "correlations": s.correlations,
        })),
    });
    out.add("indicators/manifest.json", to_json(&manifest));
    Ok(out)
}

#[derive(Serialize)]
struct PairCorrelation {
    x: String,
    y: String,
    #[serde(flatten)]
    result: Correlation,
}

pub fn cmd_correlate(ws: &mut Workspace) -> Result<Outputs> {
    ws.prepare_indicators(false)?;
    let mut out = Outputs::default();
    for c in &ws.config.correlate {
        let stage = format!("correlate {:?}", c.name);
        let mut rows = Vec::new();
        for [a, b] in &c.pairs {
            let r = (|| {
                let (x, y) = align(&ws.series(a)?, &ws.series(b)?)?;
                pearson(&x, &y)
            })()
            .map_err(|e| Error::stage(format!("{stage} {a} ~ {b}"), e))?;
            rows.push(PairCorrelation {
                x: a.clone(),
                y: b.clone(),
                result: r,
            });
        }
        let table: Vec<(String, String, Correlation)> =
            rows.iter().map(|r| (r.x.clone(), r.y.clone(), r.result)).collect();
        out.add(format!("correlate/{}.json", c.name), to_json(&rows));
        out.add(format!("correlate/{}.txt", c.name), report::correlation_table(&table));
    }
    Ok(out)
}

pub fn cmd_ccf(ws: &mut Workspace) -> Result<Outputs> {
    ws.prepare_indicators(false)?;
    let mut out = Outputs::default();
    for c in &ws.config.ccf {
        let ccf = (|| {
            let (x, y) = align(&ws.series(&c.x)?, &ws.series(&c.y)?)?;
            cross_correlation(&x, &y, c.max_lag, c.mode)
        })()
        .map_err(|e| Error::stage(format!("ccf {:?}", c.name), e))?;
        out.add(
            format!("ccf/{}.json", c.name),
            to_json(&json!({ "x": c.x, "y": c.y, "result": ccf })),
        );
        out.add(format!("ccf/{}.txt", c.name), report::ccf_table(&c.x, &c.y, &ccf));
    }
    Ok(out)
}

pub fn cmd_granger(ws: &mut Workspace) -> Result<Outputs> {
    ws.prepare_indicators(false)?;
    let mut out = Outputs::default();
    for g in &ws.config.granger {
        let mut tables = Vec::new();
        for [a, b] in &g.pairs {
            let t = (|| {
                let (x, y) = align(&ws.series(a)?, &ws.series(b)?)?;
                granger_table(&x, &y, a, b, &g.lags)
            })()
            .map_err(|e| Error::stage(format!("granger {:?} {a}/{b}", g.name), e))?;
            tables.push(t);
        }
        out.add(format!("granger/{}.json", g.name), to_json(&tables));
        out.add(format!("granger/{}.txt", g.name), report::granger_grid(&tables));
    }
    Ok(out)
}

pub fn cmd_regress(ws: &mut Workspace) -> Result<Outputs> {
    ws.prepare_indicators(false)?;
    let mut out = Outputs::default();
    for r in &ws.config.regress {
        let reg = (|| {
            let mut inputs = vec![ws.series(&r.target)?];
            for e in &r.exogenous {
                inputs.push(ws.series(e)?);
            }
            let refs: Vec<&TimeSeries> = inputs.iter().collect();
            let mut aligned = align_all(&refs)?;
            if r.standardize {
                aligned = aligned
                    .iter()
                    .map(|s| standardize(s, None).map(|(z, _)| z))
                    .collect::<Result<_>>()?;
            }
            let target = aligned.remove(0);
            let exo: Vec<(String, TimeSeries)> = r.exogenous.iter().cloned().zip(aligned).collect();
            multiple_lagged_regression(&r.target, &target, &exo, r.n_lags)
        })()
        .map_err(|e| Error::stage(format!("regress {:?}", r.name), e))?;
        out.add(format!("regress/{}.json", r.name), to_json(&reg));
        out.add(format!("regress/{}.txt", r.name), report::regression_table(&reg));
    }
    Ok(out)
}

pub fn cmd_forecast(ws: &mut Workspace) -> Result<Outputs> {
    ws.prepare_indicators(false)?;
    let mut out = Outputs::default();
    for f in &ws.config.forecast {
        let cmp = (|| {
            let mut inputs = vec![ws.series(&f.target)?];
            for e in &f.exogenous {
                inputs.push(ws.series(e)?);
            }
            let refs: Vec<&TimeSeries> = inputs.iter().collect();
            let mut aligned = align_all(&refs)?;
            let target = aligned.remove(0);
            let exo: Vec<(String, TimeSeries)> = f.exogenous.iter().cloned().zip(aligned).collect();
            let spec0 = ModelSpec::baseline(f.n_lags).standardized(f.standardize);
            let spec1 = ModelSpec::with_exogenous(f.n_lags, f.exogenous.iter().cloned())
                .standardized(f.standardize);
            let cmp = compare_models(&target, &exo, &spec0, &spec1, f.test_window)?;
            match f.mape_scale {
                MapeScale::Transformed => Ok(cmp),
                MapeScale::Raw => cmp.map_levels(libm::exp),
            }
        })()
        .map_err(|e| Error::stage(format!("forecast {:?}", f.name), e))?;
        out.add(format!("forecast/{}.json", f.name), to_json(&cmp));
        out.add(format!("forecast/{}.txt", f.name), report::forecast_table(&f.target, &cmp));
        out.add(format!("forecast/{}_errors.csv", f.name), cmp.error_curve_csv());
    }
    Ok(out)
}

/// Every configured stage in order, plus an index of the produced files.
pub fn cmd_report(ws: &mut Workspace) -> Result<Outputs> {
    let mut out = Outputs::default();
    if ws.config.indicators.is_some() {
        out.extend(cmd_indicators(ws)?);
    }
    out.extend(cmd_correlate(ws)?);
    out.extend(cmd_ccf(ws)?);
    out.extend(cmd_granger(ws)?);
    out.extend(cmd_regress(ws)?);
    out.extend(cmd_forecast(ws)?);
    let files: Vec<String> = out.0.keys().map(|p| p.display().to_string()).collect();
    let config = ws.config;
    let index = json!({
        "files": files,
        "analyses": {
            "correlate": config.correlate.iter().map(|c| &c.name).collect::<Vec<_>>(),
            "ccf": config.ccf.iter().map(|c| &c.name).collect::<Vec<_>>(),
            "granger": config.granger.iter().map(|c| &c.name).collect::<Vec<_>>(),
            "regress": config.regress.iter().map(|c| &c.name).collect::<Vec<_>>(),
            "forecast": config.forecast.iter().map(|c| &c.name).collect::<Vec<_>>(),
        },
    });
    out.add("index.json", to_json(&index));
    Ok(out)
}

/// Loads the config and runs `command` with a fresh workspace.
pub fn run_with_config(
    config: &RunConfig,
    command: fn(&mut Workspace) -> Result<Outputs>,
) -> Result<Outputs> {
    let mut ws = Workspace::new(config);
    command(&mut ws)
}
