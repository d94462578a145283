//! Component-wise RMSE scoring against known decompositions, and the corpus
//! benchmark driver.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::files::{manifest_dir, read_manifest, read_truth_csv, CorpusEntry};
use crate::mstl::{mstl_decompose, Decomposition, MstlParams, MultiSeasonalSeries};
use crate::simulate::GroundTruth;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub fn rmse(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: estimate.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid("truth", "cannot score an empty series"));
    }
    let sse: f64 = truth.iter().zip(estimate).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sse / truth.len() as f64).sqrt())
}

/// The components a decomposer should recover, on the scale it sees them.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDecomposition {
    pub trend: Vec<f64>,
    pub seasonals: BTreeMap<usize, Vec<f64>>,
    pub remainder: Vec<f64>,
}

impl ReferenceDecomposition {
    /// Scales stored components: seasonals by `seasonal_weights` (ascending
    /// period order) and the remainder by `remainder_weight`.
    pub fn weighted(
        trend: Vec<f64>,
        seasonals: Vec<(usize, Vec<f64>)>,
        remainder: Vec<f64>,
        seasonal_weights: &[f64],
        remainder_weight: f64,
    ) -> Self {
        let mut sorted = seasonals;
        sorted.sort_by_key(|(p, _)| *p);
        let seasonals = sorted
            .into_iter()
            .enumerate()
            .map(|(i, (p, s))| {
                let w = seasonal_weights.get(i).copied().unwrap_or(1.0);
                (p, s.into_iter().map(|v| w * v).collect())
            })
            .collect();
        Self {
            trend,
            seasonals,
            remainder: remainder.into_iter().map(|v| remainder_weight * v).collect(),
        }
    }

    pub fn from_ground_truth(g: &GroundTruth) -> Self {
        let [short, long] = g.config.periods();
        Self::weighted(
            g.trend.clone(),
            vec![(short, g.seasonal_short.clone()), (long, g.seasonal_long.clone())],
            g.remainder.clone(),
            &[g.config.alpha, g.config.beta],
            g.config.gamma,
        )
    }

    /// Uses an existing decomposition's components as the truth.
    pub fn from_decomposition(d: &Decomposition) -> Self {
        Self {
            trend: d.trend.clone(),
            seasonals: d.seasonals.clone(),
            remainder: d.remainder.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentScores {
    pub series_id: String,
    pub length: usize,
    pub trend_rmse: f64,
    /// Keyed by period.
    pub seasonal_rmse: BTreeMap<usize, f64>,
    pub remainder_rmse: f64,
    pub wall_clock_seconds: f64,
}

pub fn score_decomposition(
    truth: &ReferenceDecomposition,
    result: &Decomposition,
    series_id: impl Into<String>,
) -> Result<ComponentScores> {
    let mut seasonal_rmse = BTreeMap::new();
    for (p, s) in &truth.seasonals {
        let est = result.seasonals.get(p).ok_or(Error::MissingComponent(*p))?;
        seasonal_rmse.insert(*p, rmse(s, est)?);
    }
    Ok(ComponentScores {
        series_id: series_id.into(),
        length: truth.len(),
        trend_rmse: rmse(&truth.trend, &result.trend)?,
        seasonal_rmse,
        remainder_rmse: rmse(&truth.remainder, &result.remainder)?,
        wall_clock_seconds: 0.0,
    })
}

/// One number per component.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub trend: f64,
    pub seasonal: BTreeMap<usize, f64>,
    pub remainder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub series_count: usize,
    /// RMSE over all pooled squared errors.
    pub pooled: ComponentSummary,
    /// Plain mean of per-series RMSEs.
    pub mean_of_rmse: ComponentSummary,
}

/// Aggregates scores. The result does not depend on the order of `scores`.
/// Returns `None` for an empty set.
pub fn aggregate(scores: &[ComponentScores]) -> Option<Aggregate> {
    if scores.is_empty() {
        return None;
    }
    let mut sorted: Vec<&ComponentScores> = scores.iter().collect();
    sorted.sort_by(|a, b| a.series_id.cmp(&b.series_id));

    #[derive(Default)]
    struct Acc {
        sse: f64,
        n: f64,
        sum_rmse: f64,
        count: f64,
    }
    impl Acc {
        fn push(&mut self, rmse: f64, len: usize) {
            self.sse += rmse * rmse * len as f64;
            self.n += len as f64;
            self.sum_rmse += rmse;
            self.count += 1.0;
        }
    }
    let (mut trend, mut rem) = (Acc::default(), Acc::default());
    let mut seas: BTreeMap<usize, Acc> = BTreeMap::new();
    for s in sorted {
        trend.push(s.trend_rmse, s.length);
        rem.push(s.remainder_rmse, s.length);
        for (p, v) in &s.seasonal_rmse {
            seas.entry(*p).or_default().push(*v, s.length);
        }
    }
    let pooled = |a: &Acc| (a.sse / a.n).sqrt();
    let mean = |a: &Acc| a.sum_rmse / a.count;
    Some(Aggregate {
        series_count: scores.len(),
        pooled: ComponentSummary {
            trend: pooled(&trend),
            seasonal: seas.iter().map(|(p, a)| (*p, pooled(a))).collect(),
            remainder: pooled(&rem),
        },
        mean_of_rmse: ComponentSummary {
            trend: mean(&trend),
            seasonal: seas.iter().map(|(p, a)| (*p, mean(a))).collect(),
            remainder: mean(&rem),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFailure {
    pub series_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub iterate: usize,
    pub lambda: Option<f64>,
    pub s_windows: Vec<String>,
    pub robust: bool,
}

impl From<&MstlParams> for ParamsEcho {
    fn from(p: &MstlParams) -> Self {
        Self {
            iterate: p.iterate,
            lambda: p.lambda,
            s_windows: p.s_windows.iter().map(ToString::to_string).collect(),
            robust: p.stl.robust,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub params: ParamsEcho,
    pub threads: usize,
    pub series: Vec<ComponentScores>,
    pub failures: Vec<SeriesFailure>,
    /// `None` when no series was scored.
    pub aggregate: Option<Aggregate>,
    /// Sum of per-series decomposition times.
    pub decomposition_seconds: f64,
    /// Wall-clock time of the whole run, including I/O.
    pub total_seconds: f64,
}

impl EvaluationReport {
    /// One row per series: id, length, seconds, trend, seasonal columns, remainder.
    pub fn to_csv(&self) -> String {
        let periods: Vec<usize> = self
            .series
            .iter()
            .flat_map(|s| s.seasonal_rmse.keys().copied())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut out = String::from("series_id,length,seconds,trend_rmse");
        for p in &periods {
            out.push_str(&format!(",seasonal_{p}_rmse"));
        }
        out.push_str(",remainder_rmse\n");
        for s in &self.series {
            out.push_str(&format!(
                "{},{},{},{}",
                s.series_id, s.length, s.wall_clock_seconds, s.trend_rmse
            ));
            for p in &periods {
                out.push(',');
                if let Some(v) = s.seasonal_rmse.get(p) {
                    out.push_str(&v.to_string());
                }
            }
            out.push_str(&format!(",{}\n", s.remainder_rmse));
        }
        out
    }
}

/// A series to decompose together with its reference components.
#[derive(Debug, Clone)]
pub struct BenchCase {
    pub id: String,
    pub series: MultiSeasonalSeries,
    pub truth: ReferenceDecomposition,
}

fn run_case(case: &BenchCase, params: &MstlParams) -> Result<ComponentScores> {
    let start = Instant::now();
    let d = mstl_decompose(&case.series, params)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut scores = score_decomposition(&case.truth, &d, case.id.clone())?;
    scores.wall_clock_seconds = elapsed;
    Ok(scores)
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    Ok(pool.install(f))
}

/// Decomposes and scores in-memory cases on `threads` worker threads.
pub fn evaluate_cases(cases: &[BenchCase], params: &MstlParams, threads: usize) -> Result<EvaluationReport> {
    let start = Instant::now();
    let results = with_pool(threads, || {
        cases.par_iter().map(|c| run_case(c, params)).collect::<Vec<_>>()
    })?;
    let mut report = build_report(
        cases.iter().map(|c| c.id.clone()).zip(results).collect(),
        params,
        threads,
    );
    report.total_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn build_report(
    results: Vec<(String, Result<ComponentScores>)>,
    params: &MstlParams,
    threads: usize,
) -> EvaluationReport {
    let mut series = Vec::new();
    let mut failures = Vec::new();
    for (id, r) in results {
        match r {
            Ok(s) => series.push(s),
            Err(e) => failures.push(SeriesFailure {
                series_id: id,
                message: e.to_string(),
            }),
        }
    }
    EvaluationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        params: params.into(),
        threads,
        decomposition_seconds: series.iter().map(|s| s.wall_clock_seconds).sum(),
        aggregate: aggregate(&series),
        series,
        failures,
        total_seconds: 0.0,
    }
}

/// Loads one manifest entry as a benchmark case.
pub fn load_case(entry: &CorpusEntry, base_dir: &Path) -> Result<BenchCase> {
    let mut periods = entry.periods.clone();
    periods.sort_unstable();
    let table = read_truth_csv(&base_dir.join(&entry.file), periods.len())?;
    let series = MultiSeasonalSeries::new(table.composite, periods.clone())?;
    let truth = ReferenceDecomposition::weighted(
        table.trend,
        periods.into_iter().zip(table.seasonals).collect(),
        table.remainder,
        &entry.seasonal_weights(),
        entry.gamma,
    );
    Ok(BenchCase {
        id: entry.id.clone(),
        series,
        truth,
    })
}

/// Decomposes and scores every series listed in a corpus manifest. Entries
/// that cannot be read or decomposed become failure records.
pub fn run_benchmark(manifest: &Path, params: &MstlParams, threads: usize) -> Result<EvaluationReport> {
    let start = Instant::now();
    let base = manifest_dir(manifest);
    let entries = read_manifest(manifest)?;
    let results = with_pool(threads, || {
        entries
            .par_iter()
            .enumerate()
            .map(|(i, entry)| match entry {
                Ok(e) => (e.id.clone(), load_case(e, &base).and_then(|c| run_case(&c, params))),
                Err(err) => (format!("line-{}", i + 1), Err(Error::Parse(err.to_string()))),
            })
            .collect::<Vec<_>>()
    })?;
    let mut report = build_report(results, params, threads);
    report.total_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
