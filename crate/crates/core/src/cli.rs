//! The `mstlkit` command line.
//!
//! Exit codes: 0 on success, 1 for I/O failures (unreadable or malformed
//! files), 2 for invalid arguments.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bootstrap::{default_block_length, perturb_series, MbbConfig, Resampler};
use crate::error::{Error, Result};
use crate::evaluate::{run_benchmark, EvaluationReport};
use crate::files::{
    fmt_f64, read_series_file, render_manifest, render_truth_csv, seasonal_column_names, write_atomic,
    CorpusEntry, TruthTable,
};
use crate::mstl::{mstl_decompose, retain_periods, Decomposition, MstlParams, MultiSeasonalSeries};
use crate::simulate::{simulate_series, Dgp, Frequency, SeasonalNoise, SimulationConfig};
use crate::stl::SeasonalWindow;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mstlkit", version, about = "Multiple seasonal-trend decomposition toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a series file into trend, seasonal components and remainder.
    Decompose(DecomposeArgs),
    /// Generate a corpus of simulated series with known components.
    Simulate(SimulateArgs),
    /// Perturb a real series by block-bootstrapping its remainder.
    Bootstrap(BootstrapArgs),
    /// Decompose and score every series of a corpus.
    Bench(BenchArgs),
    /// Resample a series to a coarser step by summing or averaging.
    Aggregate(AggregateArgs),
}

/// Decomposition settings shared by several commands.
#[derive(Debug, Clone, Args)]
pub struct MstlArgs {
    /// Refinement sweeps over the seasonal periods.
    #[arg(long, default_value_t = 2)]
    pub iterate: usize,
    /// Box-Cox parameter in [0, 1]; no transform when omitted.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Seasonal windows per retained period (odd integers or `periodic`).
    #[arg(long, value_delimiter = ',')]
    pub swin: Vec<String>,
    /// Use robust STL fits.
    #[arg(long)]
    pub robust: bool,
}

impl MstlArgs {
    pub fn params(&self) -> Result<MstlParams> {
        let windows = self
            .swin
            .iter()
            .map(|w| w.parse::<SeasonalWindow>())
            .collect::<Result<Vec<_>>>()?;
        let mut p = MstlParams::default().with_s_windows(windows);
        p.iterate = self.iterate;
        p.lambda = self.lambda;
        p.stl.robust = self.robust;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub input: PathBuf,
    /// Seasonal periods, e.g. `24,168`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub periods: Vec<usize>,
    /// Value column to read when the file has several.
    #[arg(long)]
    pub column: Option<String>,
    #[command(flatten)]
    pub mstl: MstlArgs,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DgpArg {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FreqArg {
    Daily,
    Hourly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NoiseArg {
    RandomWalk,
    Iid,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub dgp: DgpArg,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.2)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma2: f64,
    #[arg(long, value_enum, default_value = "daily")]
    pub freq: FreqArg,
    /// Observations per series (defaults to three long cycles plus one).
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Series `i` is generated with seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// How stochastic seasonal coefficients evolve between cycles.
    #[arg(long, value_enum, default_value = "random-walk")]
    pub seasonal_noise: NoiseArg,
    #[arg(long)]
    pub outdir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub periods: Vec<usize>,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    /// Block length; twice the longest retained period (at most half the series) by default.
    #[arg(long)]
    pub block_length: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub mstl: MstlArgs,
    #[arg(long)]
    pub outdir: PathBuf,
    /// Keep each replicate's remainder unchanged (testing aid).
    #[arg(long, hide = true)]
    pub identity_resample: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Corpus manifest (JSON lines).
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub mstl: MstlArgs,
    #[arg(long, env = "MSTLKIT_THREADS", default_value_t = 1)]
    pub threads: usize,
    /// JSON report destination.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Optional per-series CSV flattening of the report.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregateMode {
    Sum,
    Mean,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    pub input: PathBuf,
    /// Step of the input, in minutes (or any unit shared with --to-step).
    #[arg(long)]
    pub from_step: u64,
    #[arg(long)]
    pub to_step: u64,
    #[arg(long, value_enum, default_value = "sum")]
    pub mode: AggregateMode,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Bootstrap(a) => cmd_bootstrap(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Aggregate(a) => cmd_aggregate(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn flag_for(name: &str) -> Option<&'static str> {
    Some(match name {
        "lambda" => "--lambda",
        "seasonal_window" => "--swin",
        "iterate" => "--iterate",
        "block_length" => "--block-length",
        "replicates" => "--replicates",
        "sigma2" => "--sigma2",
        "alpha" => "--alpha",
        "beta" => "--beta",
        "gamma" => "--gamma",
        "length" => "--length",
        "column" => "--column",
        "threads" => "--threads",
        "count" => "--count",
        "steps" => "--to-step",
        _ => return None,
    })
}

fn describe(e: &Error) -> String {
    match e {
        Error::InvalidParameter { name, reason } => match flag_for(name) {
            Some(flag) => format!("invalid value for {flag}: {reason}"),
            None => e.to_string(),
        },
        Error::SeriesTooShort { period: Some(_), .. } => format!("{e} (check --periods)"),
        _ => e.to_string(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_series(input: &Path, column: Option<&str>, periods: &[usize]) -> Result<(Option<Vec<String>>, MultiSeasonalSeries)> {
    let file = read_series_file(input, column)?;
    let series = MultiSeasonalSeries::new(file.values, periods.to_vec())?;
    Ok((file.labels, series))
}

/// Decomposition CSV: `t,data,trend,seasonal_<p>...,remainder`, preceded by
/// `#` comment lines describing the run.
pub fn render_decomposition_csv(d: &Decomposition, labels: Option<&[String]>, iterate: usize) -> String {
    let mut out = String::new();
    let join = |v: Vec<String>| if v.is_empty() { "none".to_owned() } else { v.join(",") };
    let _ = writeln!(
        out,
        "# periods={} s_windows={} iterate={} lambda={}",
        join(d.retained_periods.iter().map(ToString::to_string).collect()),
        join(d.s_windows.iter().map(ToString::to_string).collect()),
        iterate,
        d.lambda_applied.map_or("none".to_owned(), |l| l.to_string()),
    );
    for note in &d.notices {
        let _ = writeln!(out, "# note: {note}");
    }
    out.push_str("t,data,trend");
    for p in d.seasonals.keys() {
        let _ = write!(out, ",seasonal_{p}");
    }
    out.push_str(",remainder\n");
    for i in 0..d.len() {
        match labels {
            Some(l) => out.push_str(&l[i]),
            None => out.push_str(&(i + 1).to_string()),
        }
        let _ = write!(out, ",{},{}", fmt_f64(d.data[i]), fmt_f64(d.trend[i]));
        for s in d.seasonals.values() {
            let _ = write!(out, ",{}", fmt_f64(s[i]));
        }
        let _ = writeln!(out, ",{}", fmt_f64(d.remainder[i]));
    }
    out
}

pub fn cmd_decompose(a: &DecomposeArgs) -> Result<i32> {
    let params = a.mstl.params()?;
    let (labels, series) = load_series(&a.input, a.column.as_deref(), &a.periods)?;
    let d = mstl_decompose(&series, &params)?;
    for note in &d.notices {
        eprintln!("note: {note}");
    }
    let iterate = if d.retained_periods.len() == 1 { 1 } else { params.iterate };
    emit(a.out.as_deref(), &render_decomposition_csv(&d, labels.as_deref(), iterate))?;
    Ok(EXIT_OK)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<i32> {
    if a.count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let dgp = match a.dgp {
        DgpArg::Deterministic => Dgp::Deterministic,
        DgpArg::Stochastic => Dgp::Stochastic,
    };
    let frequency = match a.freq {
        FreqArg::Daily => Frequency::Daily,
        FreqArg::Hourly => Frequency::Hourly,
    };
    let base = SimulationConfig {
        dgp,
        alpha: a.alpha,
        beta: a.beta,
        gamma: a.gamma,
        sigma2: a.sigma2,
        frequency,
        length: a.length,
        seed: a.seed,
        seasonal_noise: match a.seasonal_noise {
            NoiseArg::RandomWalk => SeasonalNoise::RandomWalk,
            NoiseArg::Iid => SeasonalNoise::Iid,
        },
    };
    base.validate()?;
    fs::create_dir_all(&a.outdir)?;

    let names = seasonal_column_names(&frequency.periods());
    let mut entries = Vec::with_capacity(a.count);
    for i in 0..a.count {
        let cfg = SimulationConfig {
            seed: a.seed.wrapping_add(i as u64),
            ..base.clone()
        };
        let g = simulate_series(&cfg)?;
        let id = format!("series_{i:04}");
        let file = format!("{id}.csv");
        let table = TruthTable {
            composite: g.composite,
            trend: g.trend,
            seasonals: vec![g.seasonal_short, g.seasonal_long],
            remainder: g.remainder,
        };
        write_atomic(&a.outdir.join(&file), render_truth_csv(&table, &names).as_bytes())?;
        entries.push(CorpusEntry {
            id,
            file,
            periods: frequency.periods().to_vec(),
            alpha: cfg.alpha,
            beta: cfg.beta,
            gamma: cfg.gamma,
            seed: Some(cfg.seed),
            simulation: Some(cfg),
            block_length: None,
            source: None,
            replicate: None,
        });
    }
    write_atomic(&a.outdir.join("manifest.jsonl"), render_manifest(&entries)?.as_bytes())?;
    eprintln!("wrote {} series to {}", a.count, a.outdir.display());
    Ok(EXIT_OK)
}

pub fn cmd_bootstrap(a: &BootstrapArgs) -> Result<i32> {
    let params = a.mstl.params()?;
    let (labels, series) = load_series(&a.input, a.column.as_deref(), &a.periods)?;
    let n = series.len();
    let d = mstl_decompose(&series, &params)?;
    let block_length = a
        .block_length
        .unwrap_or_else(|| default_block_length(&retain_periods(&a.periods, n), n));
    let mut cfg = MbbConfig::new(block_length, a.replicates, a.seed);
    if a.identity_resample {
        cfg.resampler = Resampler::Identity;
    }
    let corpus = perturb_series(&d.data, &d, &cfg)?;
    fs::create_dir_all(&a.outdir)?;

    let iterate = if d.retained_periods.len() == 1 { 1 } else { params.iterate };
    write_atomic(
        &a.outdir.join("original_decomposition.csv"),
        render_decomposition_csv(&d, labels.as_deref(), iterate).as_bytes(),
    )?;

    let periods = d.retained_periods.clone();
    let names = seasonal_column_names(&periods);
    let source = a.input.display().to_string();
    let mut entries = Vec::with_capacity(a.replicates);
    for (r, (replicate, remainder)) in corpus.replicates.iter().zip(&corpus.remainders).enumerate() {
        let id = format!("replicate_{r:04}");
        let file = format!("{id}.csv");
        let table = TruthTable {
            composite: replicate.clone(),
            trend: d.trend.clone(),
            seasonals: d.seasonals.values().cloned().collect(),
            remainder: remainder.clone(),
        };
        write_atomic(&a.outdir.join(&file), render_truth_csv(&table, &names).as_bytes())?;
        entries.push(CorpusEntry {
            id,
            file,
            periods: periods.clone(),
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            simulation: None,
            block_length: Some(block_length),
            source: Some(source.clone()),
            replicate: Some(r),
            seed: Some(a.seed),
        });
    }
    write_atomic(&a.outdir.join("manifest.jsonl"), render_manifest(&entries)?.as_bytes())?;
    eprintln!(
        "wrote {} replicates (block length {block_length}) to {}",
        a.replicates,
        a.outdir.display()
    );
    Ok(EXIT_OK)
}

/// Plain-text summary of a report.
pub fn render_table(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let Some(agg) = &report.aggregate else {
        let _ = writeln!(out, "no series scored ({} failures)", report.failures.len());
        return out;
    };
    let _ = writeln!(out, "{:<18} {:>12} {:>12}", "component", "pooled RMSE", "mean RMSE");
    let _ = writeln!(out, "{:<18} {:>12.4} {:>12.4}", "Trend", agg.pooled.trend, agg.mean_of_rmse.trend);
    for (p, v) in &agg.pooled.seasonal {
        let _ = writeln!(
            out,
            "{:<18} {:>12.4} {:>12.4}",
            format!("Seasonal ({p})"),
            v,
            agg.mean_of_rmse.seasonal[p]
        );
    }
    let _ = writeln!(out, "{:<18} {:>12.4} {:>12.4}", "Remainder", agg.pooled.remainder, agg.mean_of_rmse.remainder);
    let _ = writeln!(
        out,
        "series: {}  failures: {}  decomposition: {:.3} s  total wall-clock: {:.3} s",
        agg.series_count,
        report.failures.len(),
        report.decomposition_seconds,
        report.total_seconds
    );
    out
}

pub fn cmd_bench(a: &BenchArgs) -> Result<i32> {
    if a.threads == 0 {
        return Err(Error::invalid("threads", "must be at least 1"));
    }
    let params = a.mstl.params()?;
    let report = run_benchmark(&a.corpus, &params, a.threads)?;
    for f in &report.failures {
        eprintln!("failed: {}: {}", f.series_id, f.message);
    }
    print!("{}", render_table(&report));
    if let Some(p) = &a.report {
        write_atomic(p, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    if let Some(p) = &a.csv {
        write_atomic(p, report.to_csv().as_bytes())?;
    }
    Ok(if report.series.is_empty() { EXIT_IO } else { EXIT_OK })
}

/// Groups consecutive values `factor` at a time; a trailing partial group is dropped.
pub fn aggregate_values(values: &[f64], factor: usize, mode: AggregateMode) -> Vec<f64> {
    values
        .chunks_exact(factor)
        .map(|g| {
            let s: f64 = g.iter().sum();
            match mode {
                AggregateMode::Sum => s,
                AggregateMode::Mean => s / factor as f64,
            }
        })
        .collect()
}

/// Minutes past midnight of an ISO-8601-like label (`...THH:MM` or `... HH:MM`).
fn minute_of_day(label: &str) -> Option<u64> {
    let time = label.split(['T', ' ']).nth(1)?;
    let mut parts = time.split(':');
    let h: u64 = parts.next()?.parse().ok()?;
    let m: u64 = parts.next()?.get(..2)?.parse().ok()?;
    Some(h * 60 + m)
}

pub fn cmd_aggregate(a: &AggregateArgs) -> Result<i32> {
    if a.from_step == 0 || a.to_step == 0 || !a.to_step.is_multiple_of(a.from_step) {
        return Err(Error::invalid(
            "steps",
            format!("output step {} must be a multiple of input step {}", a.to_step, a.from_step),
        ));
    }
    let factor = (a.to_step / a.from_step) as usize;
    let file = read_series_file(&a.input, a.column.as_deref())?;
    let n = file.values.len();
    if n % factor != 0 {
        eprintln!("warning: dropping {} trailing rows that do not fill a group", n % factor);
    }
    if let Some(first) = file.labels.as_ref().and_then(|l| l.first()) {
        if let Some(m) = minute_of_day(first) {
            if m != 0 {
                eprintln!("warning: series starts at {first}, so the first day is partial");
            }
            if m % a.to_step != 0 {
                eprintln!("warning: first row is not aligned to the output step");
            }
        }
    }
    let values = aggregate_values(&file.values, factor, a.mode);
    let mut out = String::new();
    let time_header = if file.labels.is_some() { "t" } else { "index" };
    let _ = writeln!(out, "{time_header},{}", file.value_column);
    for (i, v) in values.iter().enumerate() {
        let label = match &file.labels {
            Some(l) => l[i * factor].clone(),
            None => (i + 1).to_string(),
        };
        let _ = writeln!(out, "{label},{}", fmt_f64(*v));
    }
    emit(a.out.as_deref(), &out)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_groups() {
        let v: Vec<f64> = (0..7200).map(|i| i as f64).collect();
        let out = aggregate_values(&v, 2, AggregateMode::Sum);
        assert_eq!(out.len(), 3600);
        assert_eq!(out[0], 1.0);
        assert_eq!(aggregate_values(&[2.0; 9], 3, AggregateMode::Mean), vec![2.0; 3]);
        assert_eq!(aggregate_values(&[1.0; 7], 2, AggregateMode::Sum).len(), 3);
    }

    #[test]
    fn minute_parsing() {
        assert_eq!(minute_of_day("2012-01-01T00:30:00"), Some(30));
        assert_eq!(minute_of_day("2012-01-01 13:00"), Some(780));
        assert_eq!(minute_of_day("17"), None);
    }

    #[test]
    fn params_from_flags() {
        let args = MstlArgs {
            iterate: 3,
            lambda: Some(0.5),
            swin: vec!["periodic".into(), "13".into()],
            robust: true,
        };
        let p = args.params().unwrap();
        assert_eq!(p.iterate, 3);
        assert_eq!(p.s_windows, vec![SeasonalWindow::Periodic, SeasonalWindow::Span(13)]);
        assert!(p.stl.robust);
        let bad = MstlArgs { swin: vec!["wide".into()], ..args };
        assert!(bad.params().is_err());
    }

    #[test]
    fn validation_messages_name_flags() {
        let e = Error::invalid("lambda", "must lie in [0, 1], got 2");
        assert!(describe(&e).contains("--lambda"));
    }
}
