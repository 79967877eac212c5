//! Command-line front end. Every analysis subcommand reads a TOML run
//! config; results go under the output directory as CSV, JSON and text.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for bad
//! configuration or unreadable inputs.

pub mod commands;
pub mod config;
pub mod demo;
pub mod workspace;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use crate::corpus::{load_lexicon, write_corpus};
use crate::error::{Error, Result};
use crate::synth::{gen_coupled_pair, gen_corpus, VarSpec, SYNTH_START};
use crate::timeseries::{write_csv, Frequency, TimeSeries};
use commands::{run_with_config, Outputs};
use config::RunConfig;
use workspace::Workspace;

#[derive(Parser, Debug)]
#[command(name = "finsent", version, about = "Sentiment indicators and lead-lag analysis of market series")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Run config (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build daily NNS, TIS and term-volume indicators from the corpora.
    Indicators(RunArgs),
    /// Pearson correlations for the configured pairs.
    Correlate(RunArgs),
    /// Cross-correlation functions.
    Ccf(RunArgs),
    /// Granger causality grids.
    Granger(RunArgs),
    /// Multiple lagged regressions.
    Regress(RunArgs),
    /// Rolling one-step forecasts, baseline against augmented model.
    Forecast(RunArgs),
    /// Every configured stage.
    Report(RunArgs),
    /// Write a coupled pair x, y with y[t] = coupling * x[t - lag] + noise.
    SynthPair {
        #[arg(long, default_value_t = 0.8)]
        coupling: f64,
        #[arg(long, default_value_t = 1)]
        lag: usize,
        #[arg(long, default_value_t = 0.1)]
        noise_std: f64,
        #[arg(long, default_value_t = 300)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Write a synthetic corpus with fixed bullish and lexicon-word rates.
    SynthCorpus {
        /// Lexicon whose single-word terms are injected.
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long, default_value_t = 30)]
        days: usize,
        #[arg(long, default_value_t = 100)]
        docs_per_day: usize,
        #[arg(long, default_value_t = 0.75)]
        bull_prob: f64,
        #[arg(long, default_value_t = 0.1)]
        neg_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output corpus (.jsonl or .tsv).
        #[arg(short, long, default_value = "corpus.jsonl")]
        out: PathBuf,
    },
    /// Write a small demo dataset with a ready-to-run config.
    DemoData {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(short, long, default_value = "demo")]
        out: PathBuf,
    },
}

fn analysis(args: &RunArgs, command: fn(&mut Workspace) -> Result<Outputs>) -> Result<()> {
    let config = RunConfig::load(&args.config)?;
    let out_dir = match (&args.out, &config.out) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => config.resolve(o),
        (None, None) => PathBuf::from("out"),
    };
    let outputs = run_with_config(&config, command)?;
    outputs.write_all(&out_dir)?;
    info!("wrote {} files under {}", outputs.0.len(), out_dir.display());
    Ok(())
}

fn synth_pair(spec: VarSpec, out: &Path) -> Result<()> {
    let (x, y) = gen_coupled_pair(&spec)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_csv(&x, out.join("x.csv"))?;
    write_csv(&y, out.join("y.csv"))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn synth_corpus(
    lexicon: &Path,
    days: usize,
    docs_per_day: usize,
    bull_prob: f64,
    neg_prob: f64,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let lex = load_lexicon(lexicon)?;
    let bull = TimeSeries::from_values(Frequency::Daily, SYNTH_START, vec![bull_prob; days])?;
    let neg = TimeSeries::from_values(Frequency::Daily, SYNTH_START, vec![neg_prob; days])?;
    let corpus = gen_corpus(docs_per_day, &bull, &lex, &neg, seed)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    write_corpus(&corpus, out)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Indicators(a) => analysis(&a, commands::cmd_indicators),
        Command::Correlate(a) => analysis(&a, commands::cmd_correlate),
        Command::Ccf(a) => analysis(&a, commands::cmd_ccf),
        Command::Granger(a) => analysis(&a, commands::cmd_granger),
        Command::Regress(a) => analysis(&a, commands::cmd_regress),
        Command::Forecast(a) => analysis(&a, commands::cmd_forecast),
        Command::Report(a) => analysis(&a, commands::cmd_report),
        Command::SynthPair { coupling, lag, noise_std, length, seed, out } => {
            synth_pair(VarSpec { coupling, lag, noise_std, length, seed }, &out)
        }
        Command::SynthCorpus { lexicon, days, docs_per_day, bull_prob, neg_prob, seed, out } => {
            synth_corpus(&lexicon, days, docs_per_day, bull_prob, neg_prob, seed, &out)
        }
        Command::DemoData { seed, out } => demo::demo_dataset(seed)?.write_all(&out),
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_input_error() {
        2
    } else {
        1
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
