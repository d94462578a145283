//! Multiple seasonal-trend decomposition.
//!
//! STL is applied repeatedly, once per seasonal period in ascending order.
//! Each pass adds the previous estimate of a seasonal component back into the
//! deseasonalised series, refits STL at that period and removes the new
//! estimate again. After `iterate` sweeps the trend of the last STL fit is
//! kept. Series without a usable period get a super-smoother trend instead.
//!
//! Periods are kept only when they fit at least twice into the series
//! (`1 < p < n / 2`).

use std::collections::BTreeMap;

use crate::error::{ensure_finite, Error, Result};
use crate::preprocess::{boxcox, interpolate_missing, BoxCoxLambda};
use crate::stl::{stl_decompose, SeasonalWindow, StlParams};
use crate::supsmu::{supsmu_smooth, SupsmuConfig};

/// Observations (NaN marks a missing value) together with their declared
/// seasonal periods.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeasonalSeries {
    values: Vec<f64>,
    periods: Vec<usize>,
    origin: Option<String>,
    step: f64,
}

impl MultiSeasonalSeries {
    pub fn new(values: Vec<f64>, periods: Vec<usize>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                required: 3,
                period: None,
            });
        }
        if let Some(index) = values.iter().position(|v| v.is_infinite()) {
            return Err(Error::NonFinite {
                index,
                value: values[index],
            });
        }
        Ok(Self {
            values,
            periods,
            origin: None,
            step: 1.0,
        })
    }

    /// Attaches reporting metadata: a label for the first observation and the
    /// spacing between observations.
    pub fn with_origin(mut self, origin: impl Into<String>, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid("step", format!("must be positive, got {step}")));
        }
        self.origin = Some(origin.into());
        self.step = step;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    pub fn origin(&self) -> Option<&str> {
        self.origin.as_deref()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|v| v.is_nan())
    }
}

/// Default seasonal windows: the `i`-th period (from 1) gets the smallest odd
/// number in `{c + k*i, c + k*i + 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SWindowPolicy {
    pub c: usize,
    pub k: usize,
}

impl Default for SWindowPolicy {
    fn default() -> Self {
        Self { c: 7, k: 4 }
    }
}

pub fn default_s_windows(num_periods: usize, policy: SWindowPolicy) -> Vec<usize> {
    (1..=num_periods)
        .map(|i| {
            let base = policy.c + policy.k * i;
            if base % 2 == 1 { base } else { base + 1 }
        })
        .collect()
}

/// Periods usable for a series of length `series_length`: strictly between 1
/// and half the length, deduplicated, ascending.
pub fn retain_periods(periods: &[usize], series_length: usize) -> Vec<usize> {
    let mut kept: Vec<usize> = periods
        .iter()
        .copied()
        .filter(|&p| p > 1 && 2 * p < series_length)
        .collect();
    kept.sort_unstable();
    kept.dedup();
    kept
}

/// STL controls forwarded to every per-period fit. `None` keeps the STL default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StlOverrides {
    pub trend_window: Option<usize>,
    pub lowpass_window: Option<usize>,
    pub seasonal_degree: Option<usize>,
    pub trend_degree: Option<usize>,
    pub lowpass_degree: Option<usize>,
    pub inner_iterations: Option<usize>,
    pub outer_iterations: Option<usize>,
    pub seasonal_jump: Option<usize>,
    pub trend_jump: Option<usize>,
    pub lowpass_jump: Option<usize>,
    /// Use the robust iteration counts unless explicitly overridden.
    pub robust: bool,
}

impl StlOverrides {
    fn apply(&self, mut p: StlParams) -> StlParams {
        if self.robust {
            p = p.robust();
        }
        p.trend_window = self.trend_window.or(p.trend_window);
        p.lowpass_window = self.lowpass_window.or(p.lowpass_window);
        p.seasonal_degree = self.seasonal_degree.unwrap_or(p.seasonal_degree);
        p.trend_degree = self.trend_degree.unwrap_or(p.trend_degree);
        p.lowpass_degree = self.lowpass_degree.unwrap_or(p.lowpass_degree);
        p.inner_iterations = self.inner_iterations.unwrap_or(p.inner_iterations);
        p.outer_iterations = self.outer_iterations.unwrap_or(p.outer_iterations);
        p.seasonal_jump = self.seasonal_jump.or(p.seasonal_jump);
        p.trend_jump = self.trend_jump.or(p.trend_jump);
        p.lowpass_jump = self.lowpass_jump.or(p.lowpass_jump);
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstlParams {
    pub iterate: usize,
    pub lambda: Option<f64>,
    /// Seasonal windows by retained period; missing entries use `s_window_policy`.
    pub s_windows: Vec<SeasonalWindow>,
    pub s_window_policy: SWindowPolicy,
    pub stl: StlOverrides,
    pub supsmu: SupsmuConfig,
}

impl Default for MstlParams {
    fn default() -> Self {
        Self {
            iterate: 2,
            lambda: None,
            s_windows: Vec::new(),
            s_window_policy: SWindowPolicy::default(),
            stl: StlOverrides::default(),
            supsmu: SupsmuConfig::default(),
        }
    }
}

impl MstlParams {
    pub fn with_iterate(mut self, iterate: usize) -> Self {
        self.iterate = iterate;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_s_windows(mut self, windows: impl IntoIterator<Item = SeasonalWindow>) -> Self {
        self.s_windows = windows.into_iter().collect();
        self
    }

    pub fn robust(mut self) -> Self {
        self.stl.robust = true;
        self
    }

    /// Seasonal windows actually used for `num_periods` retained periods.
    pub fn resolved_s_windows(&self, num_periods: usize) -> Vec<SeasonalWindow> {
        let defaults = default_s_windows(num_periods, self.s_window_policy);
        (0..num_periods)
            .map(|i| {
                self.s_windows
                    .get(i)
                    .copied()
                    .unwrap_or(SeasonalWindow::Span(defaults[i]))
            })
            .collect()
    }

    /// STL parameters for one period.
    pub fn stl_params(&self, period: usize, window: SeasonalWindow) -> StlParams {
        self.stl.apply(StlParams::new(period, window))
    }
}

/// Additive decomposition of a (possibly transformed) series.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// The series that was decomposed, after imputation and Box-Cox.
    pub data: Vec<f64>,
    pub trend: Vec<f64>,
    /// Seasonal components keyed by period, ascending.
    pub seasonals: BTreeMap<usize, Vec<f64>>,
    pub remainder: Vec<f64>,
    pub lambda_applied: Option<f64>,
    pub retained_periods: Vec<usize>,
    pub s_windows: Vec<SeasonalWindow>,
    /// Human-readable notes, e.g. about ignored periods.
    pub notices: Vec<String>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Sum of every component at each time point.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .trend
            .iter()
            .zip(&self.remainder)
            .map(|(t, r)| t + r)
            .collect();
        for s in self.seasonals.values() {
            for (o, v) in out.iter_mut().zip(s) {
                *o += v;
            }
        }
        out
    }
}

/// The series with every seasonal component removed.
pub fn seasonal_adjust(d: &Decomposition) -> Vec<f64> {
    let mut out = d.data.clone();
    for s in d.seasonals.values() {
        for (o, v) in out.iter_mut().zip(s) {
            *o -= v;
        }
    }
    out
}

pub fn mstl_decompose(series: &MultiSeasonalSeries, params: &MstlParams) -> Result<Decomposition> {
    let n = series.len();
    if params.iterate == 0 {
        return Err(Error::invalid("iterate", "must be at least 1"));
    }
    let lambda = params.lambda.map(BoxCoxLambda::new).transpose()?;

    let retained = retain_periods(series.periods(), n);
    let notices = ignored_period_notices(series.periods(), &retained, n);
    if let Some(&max) = retained.last() {
        if n < 2 * max + 1 {
            return Err(Error::SeriesTooShort {
                len: n,
                required: 2 * max + 1,
                period: Some(max),
            });
        }
    }
    let iterate = if retained.len() == 1 { 1 } else { params.iterate };

    let mut data = if series.has_missing() {
        interpolate_missing(series)?
    } else {
        series.values().to_vec()
    };
    if let Some(l) = lambda {
        data = boxcox(&data, l)?;
    }
    ensure_finite(&data)?;

    let mut seasonals = BTreeMap::new();
    let s_windows = params.resolved_s_windows(retained.len());
    let mut deseas = data.clone();
    let trend = if retained.is_empty() {
        supsmu_smooth(&data, &params.supsmu)?
    } else {
        let stl_params: Vec<StlParams> = retained
            .iter()
            .zip(&s_windows)
            .map(|(&p, &w)| params.stl_params(p, w))
            .collect();
        let mut seasonality = vec![vec![0.0; n]; retained.len()];
        let mut trend = Vec::new();
        for _ in 0..iterate {
            for (season, stl) in seasonality.iter_mut().zip(&stl_params) {
                for (d, s) in deseas.iter_mut().zip(season.iter()) {
                    *d += s;
                }
                let fit = stl_decompose(&deseas, stl)?;
                *season = fit.seasonal;
                for (d, s) in deseas.iter_mut().zip(season.iter()) {
                    *d -= s;
                }
                trend = fit.trend;
            }
        }
        seasonals.extend(retained.iter().copied().zip(seasonality));
        trend
    };

    let remainder = deseas.iter().zip(&trend).map(|(d, t)| d - t).collect();
    Ok(Decomposition {
        data,
        trend,
        seasonals,
        remainder,
        lambda_applied: lambda.map(BoxCoxLambda::value),
        retained_periods: retained,
        s_windows,
        notices,
    })
}

fn ignored_period_notices(declared: &[usize], retained: &[usize], n: usize) -> Vec<String> {
    let mut seen = Vec::new();
    let mut notices = Vec::new();
    for &p in declared {
        if seen.contains(&p) {
            notices.push(format!("duplicate period {p} ignored"));
            continue;
        }
        seen.push(p);
        if !retained.contains(&p) {
            if p <= 1 {
                notices.push(format!("period {p} is not seasonal and was ignored"));
            } else {
                notices.push(format!(
                    "period {p} ignored: fewer than two full cycles in {n} observations"
                ));
            }
        }
    }
    notices
}
