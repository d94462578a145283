//! Single-period seasonal-trend decomposition by loess.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_finite, Error, Result};
use crate::loess::{fit_point_with_fallback, loess_smooth_into, LoessConfig, WeightedSeries};

/// Span of the cycle-subseries smoother.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeasonalWindow {
    /// Seasonal pattern frozen over time: each phase is its (weighted) mean.
    Periodic,
    /// Loess window (odd, at least 3) applied along each cycle-subseries.
    Span(usize),
}

impl SeasonalWindow {
    /// Window width used when deriving the default trend window.
    fn effective_width(self, n: usize) -> usize {
        match self {
            SeasonalWindow::Periodic => 10 * n + 1,
            SeasonalWindow::Span(w) => w,
        }
    }
}

impl fmt::Display for SeasonalWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeasonalWindow::Periodic => f.write_str("periodic"),
            SeasonalWindow::Span(w) => write!(f, "{w}"),
        }
    }
}

impl FromStr for SeasonalWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("periodic") || s.eq_ignore_ascii_case("per") {
            return Ok(SeasonalWindow::Periodic);
        }
        let w: usize = s
            .parse()
            .map_err(|_| Error::invalid("seasonal_window", format!("cannot parse `{s}`")))?;
        Ok(SeasonalWindow::Span(w))
    }
}

impl From<usize> for SeasonalWindow {
    fn from(w: usize) -> Self {
        SeasonalWindow::Span(w)
    }
}

/// Controls for one STL run.
///
/// `None` windows and jumps are derived from the period and seasonal window
/// when the decomposition runs.
#[derive(Debug, Clone, PartialEq)]
pub struct StlParams {
    pub period: usize,
    pub seasonal_window: SeasonalWindow,
    pub trend_window: Option<usize>,
    pub lowpass_window: Option<usize>,
    pub seasonal_degree: usize,
    pub trend_degree: usize,
    pub lowpass_degree: usize,
    pub inner_iterations: usize,
    pub outer_iterations: usize,
    pub seasonal_jump: Option<usize>,
    pub trend_jump: Option<usize>,
    pub lowpass_jump: Option<usize>,
}

impl StlParams {
    /// Non-robust defaults: two inner passes, no robustness iterations.
    pub fn new(period: usize, seasonal_window: impl Into<SeasonalWindow>) -> Self {
        Self {
            period,
            seasonal_window: seasonal_window.into(),
            trend_window: None,
            lowpass_window: None,
            seasonal_degree: 0,
            trend_degree: 1,
            lowpass_degree: 1,
            inner_iterations: 2,
            outer_iterations: 0,
            seasonal_jump: None,
            trend_jump: None,
            lowpass_jump: None,
        }
    }

    /// Switches to the robust iteration scheme (one inner pass, fifteen robustness passes).
    pub fn robust(mut self) -> Self {
        self.inner_iterations = 1;
        self.outer_iterations = 15;
        self
    }

    pub fn with_trend_window(mut self, w: usize) -> Self {
        self.trend_window = Some(w);
        self
    }

    pub fn with_lowpass_window(mut self, w: usize) -> Self {
        self.lowpass_window = Some(w);
        self
    }

    pub fn with_iterations(mut self, inner: usize, outer: usize) -> Self {
        self.inner_iterations = inner;
        self.outer_iterations = outer;
        self
    }

    /// Resolved trend window for a series of length `n`.
    pub fn resolved_trend_window(&self, n: usize) -> usize {
        self.trend_window.unwrap_or_else(|| {
            let ns = self.seasonal_window.effective_width(n) as f64;
            next_odd((1.5 * self.period as f64 / (1.0 - 1.5 / ns)).ceil() as usize)
        })
    }

    /// Resolved low-pass window.
    pub fn resolved_lowpass_window(&self) -> usize {
        self.lowpass_window.unwrap_or_else(|| next_odd(self.period))
    }

    fn resolve(&self, n: usize) -> Result<Resolved> {
        if self.period < 2 {
            return Err(Error::invalid("period", format!("must be at least 2, got {}", self.period)));
        }
        if n < 2 * self.period {
            return Err(Error::SeriesTooShort {
                len: n,
                required: 2 * self.period,
                period: Some(self.period),
            });
        }
        if self.inner_iterations == 0 {
            return Err(Error::invalid("inner_iterations", "must be at least 1"));
        }
        if self.seasonal_degree > 1 {
            return Err(Error::invalid("seasonal_degree", "must be 0 or 1"));
        }
        if self.lowpass_degree > 1 {
            return Err(Error::invalid("lowpass_degree", "must be 0 or 1"));
        }
        let seasonal = match self.seasonal_window {
            SeasonalWindow::Periodic => None,
            SeasonalWindow::Span(w) => {
                if w < 3 || w % 2 == 0 {
                    return Err(Error::invalid(
                        "seasonal_window",
                        format!("must be an odd integer >= 3 or `periodic`, got {w}"),
                    ));
                }
                let jump = self.seasonal_jump.unwrap_or_else(|| w.div_ceil(10));
                Some(LoessConfig::new(w, self.seasonal_degree, jump)?)
            }
        };
        let tw = self.resolved_trend_window(n);
        let lw = self.resolved_lowpass_window();
        let trend = LoessConfig::new(
            tw,
            self.trend_degree,
            self.trend_jump.unwrap_or_else(|| tw.div_ceil(10)),
        )
        .map_err(|e| rename(e, "trend_window"))?;
        let lowpass = LoessConfig::new(
            lw,
            self.lowpass_degree,
            self.lowpass_jump.unwrap_or_else(|| lw.div_ceil(10)),
        )
        .map_err(|e| rename(e, "lowpass_window"))?;
        Ok(Resolved {
            seasonal,
            trend,
            lowpass,
        })
    }
}

fn rename(e: Error, name: &'static str) -> Error {
    match e {
        Error::InvalidParameter { reason, .. } => Error::InvalidParameter { name, reason },
        other => other,
    }
}

/// Smallest odd integer `>= x`.
pub(crate) fn next_odd(x: usize) -> usize {
    if x.is_multiple_of(2) {
        x + 1
    } else {
        x
    }
}

struct Resolved {
    seasonal: Option<LoessConfig>,
    trend: LoessConfig,
    lowpass: LoessConfig,
}

/// Output of [`stl_decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct StlFit {
    pub seasonal: Vec<f64>,
    pub trend: Vec<f64>,
    pub remainder: Vec<f64>,
    pub robustness_weights: Vec<f64>,
}

/// Decomposes `values` into seasonal, trend and remainder at a single period.
pub fn stl_decompose(values: &[f64], params: &StlParams) -> Result<StlFit> {
    ensure_finite(values)?;
    let n = values.len();
    let cfg = params.resolve(n)?;
    let p = params.period;

    let mut work = Workspace::new(n, p);
    let mut seasonal = vec![0.0; n];
    let mut trend = vec![0.0; n];
    let mut weights: Option<Vec<f64>> = None;

    let mut pass = 0;
    loop {
        for _ in 0..params.inner_iterations {
            inner_step(
                values,
                p,
                &cfg,
                weights.as_deref(),
                &mut work,
                &mut seasonal,
                &mut trend,
            )?;
        }
        pass += 1;
        if pass > params.outer_iterations {
            break;
        }
        let resid: Vec<f64> = (0..n).map(|i| values[i] - seasonal[i] - trend[i]).collect();
        weights = Some(bisquare_robustness(&resid));
    }

    let remainder = (0..n).map(|i| values[i] - seasonal[i] - trend[i]).collect();
    Ok(StlFit {
        seasonal,
        trend,
        remainder,
        robustness_weights: weights.unwrap_or_else(|| vec![1.0; n]),
    })
}

struct Workspace {
    detrended: Vec<f64>,
    cycle: Vec<f64>,
    ma1: Vec<f64>,
    ma2: Vec<f64>,
    ma3: Vec<f64>,
    lowpass: Vec<f64>,
    sub_values: Vec<f64>,
    sub_weights: Vec<f64>,
    sub_fit: Vec<f64>,
}

impl Workspace {
    fn new(n: usize, p: usize) -> Self {
        let k = n / p + 1;
        Self {
            detrended: vec![0.0; n],
            cycle: vec![0.0; n + 2 * p],
            ma1: vec![0.0; n + p + 1],
            ma2: vec![0.0; n + 2],
            ma3: vec![0.0; n],
            lowpass: vec![0.0; n],
            sub_values: Vec::with_capacity(k),
            sub_weights: Vec::with_capacity(k),
            sub_fit: vec![0.0; k],
        }
    }
}

fn inner_step(
    values: &[f64],
    p: usize,
    cfg: &Resolved,
    weights: Option<&[f64]>,
    work: &mut Workspace,
    seasonal: &mut [f64],
    trend: &mut [f64],
) -> Result<()> {
    let n = values.len();
    for i in 0..n {
        work.detrended[i] = values[i] - trend[i];
    }

    match &cfg.seasonal {
        Some(sc) => smooth_cycle_subseries(p, sc, weights, work)?,
        None => {
            let means = periodic_means(&work.detrended, p, weights);
            for (i, c) in work.cycle.iter_mut().enumerate() {
                *c = means[i % p];
            }
        }
    }

    moving_average(&work.cycle, p, &mut work.ma1);
    moving_average(&work.ma1, p, &mut work.ma2);
    moving_average(&work.ma2, 3, &mut work.ma3);
    loess_smooth_into(&WeightedSeries::regular(&work.ma3), &cfg.lowpass, &mut work.lowpass)?;

    for i in 0..n {
        seasonal[i] = work.cycle[p + i] - work.lowpass[i];
        work.detrended[i] = values[i] - seasonal[i];
    }
    let deseasonalized = WeightedSeries::regular(&work.detrended).weights_unchecked(weights);
    loess_smooth_into(&deseasonalized, &cfg.trend, trend)
}

/// Smooths every cycle-subseries, writing `n + 2p` values into `work.cycle`
/// (one extrapolated cycle before and after the data).
fn smooth_cycle_subseries(
    p: usize,
    cfg: &LoessConfig,
    weights: Option<&[f64]>,
    work: &mut Workspace,
) -> Result<()> {
    let Workspace {
        detrended,
        cycle,
        sub_values,
        sub_weights,
        sub_fit,
        ..
    } = work;
    let n = detrended.len();
    for phase in 0..p {
        sub_values.clear();
        sub_values.extend(detrended[phase..].iter().step_by(p));
        let k = sub_values.len();
        if let Some(w) = weights {
            sub_weights.clear();
            sub_weights.extend(w[phase..].iter().step_by(p));
        }
        let sub = WeightedSeries::regular(sub_values)
            .weights_unchecked(weights.map(|_| sub_weights.as_slice()));
        let fit = &mut sub_fit[..k];
        loess_smooth_into(&sub, cfg, fit)?;
        let before = fit_point_with_fallback(&sub, 0.0, cfg).unwrap_or(fit[0]);
        let after = fit_point_with_fallback(&sub, (k + 1) as f64, cfg).unwrap_or(fit[k - 1]);

        cycle[phase] = before;
        for (m, v) in fit.iter().enumerate() {
            cycle[(m + 1) * p + phase] = *v;
        }
        cycle[(k + 1) * p + phase] = after;
    }
    debug_assert!(cycle.len() == n + 2 * p);
    Ok(())
}

/// Weighted mean of each phase; unweighted where a phase carries no weight.
fn periodic_means(values: &[f64], period: usize, weights: Option<&[f64]>) -> Vec<f64> {
    let mut sum = vec![0.0; period];
    let mut wsum = vec![0.0; period];
    let mut plain = vec![0.0; period];
    let mut count = vec![0usize; period];
    for (i, &v) in values.iter().enumerate() {
        let ph = i % period;
        let w = weights.map_or(1.0, |w| w[i]);
        sum[ph] += w * v;
        wsum[ph] += w;
        plain[ph] += v;
        count[ph] += 1;
    }
    (0..period)
        .map(|ph| {
            if wsum[ph] > 0.0 {
                sum[ph] / wsum[ph]
            } else {
                plain[ph] / count[ph].max(1) as f64
            }
        })
        .collect()
}

/// Replaces each cycle-subseries by its mean, giving an exactly periodic series.
pub fn periodic_seasonal(values: &[f64], period: usize) -> Result<Vec<f64>> {
    if period == 0 {
        return Err(Error::invalid("period", "must be positive"));
    }
    if values.len() < period {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            required: period,
            period: Some(period),
        });
    }
    let means = periodic_means(values, period, None);
    Ok((0..values.len()).map(|i| means[i % period]).collect())
}

/// Running mean of width `len`; `out` has `x.len() - len + 1` entries.
fn moving_average(x: &[f64], len: usize, out: &mut [f64]) {
    let flen = len as f64;
    let mut acc: f64 = x[..len].iter().sum();
    out[0] = acc / flen;
    for i in 1..out.len() {
        acc += x[i + len - 1] - x[i - 1];
        out[i] = acc / flen;
    }
}

/// Bisquare robustness weights from a remainder series.
///
/// The scale is six times the median absolute remainder; residuals at or
/// beyond it get weight zero.
pub fn bisquare_robustness(remainder: &[f64]) -> Vec<f64> {
    if remainder.is_empty() {
        return Vec::new();
    }
    let mut abs: Vec<f64> = remainder.iter().map(|r| r.abs()).collect();
    let n = abs.len();
    let (lo, hi) = ((n - 1) / 2, n / 2);
    abs.select_nth_unstable_by(hi, f64::total_cmp);
    let upper = abs[hi];
    let lower = if lo == hi {
        upper
    } else {
        *abs[..hi].iter().max_by(|a, b| a.total_cmp(b)).unwrap()
    };
    let h = 3.0 * (lower + upper);

    remainder
        .iter()
        .map(|r| {
            let a = r.abs();
            if h <= 0.0 {
                if a == 0.0 { 1.0 } else { 0.0 }
            } else if a >= h {
                0.0
            } else {
                let u = a / h;
                let t = 1.0 - u * u;
                t * t
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisquare_examples() {
        assert_eq!(bisquare_robustness(&[0.0; 6]), vec![1.0; 6]);
        let w = bisquare_robustness(&[1.0, -1.0, 2.0, -2.0, 8.0]);
        assert!((w[4] - 25.0 / 81.0).abs() < 1e-15);
        assert!((w[4] - 0.30864).abs() < 1e-5);
        // |r| = h exactly: h = 6 * median(1, 1, 1, 1, 6) = 6.
        let w = bisquare_robustness(&[1.0, 1.0, -1.0, 1.0, 6.0]);
        assert_eq!(w[4], 0.0);
        assert!(w.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn periodic_seasonal_examples() {
        let a = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        assert_eq!(periodic_seasonal(&a, 2).unwrap(), a.to_vec());
        assert_eq!(
            periodic_seasonal(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(),
            vec![2.0, 3.0, 2.0, 3.0]
        );
        assert!(periodic_seasonal(&[1.0], 2).is_err());
    }

    #[test]
    fn default_windows() {
        let p = StlParams::new(24, 11);
        assert_eq!(p.resolved_trend_window(505), 43);
        assert_eq!(p.resolved_lowpass_window(), 25);
        let p = StlParams::new(168, 15);
        assert_eq!(p.resolved_trend_window(505), 281);
        assert_eq!(p.resolved_lowpass_window(), 169);
        let p = StlParams::new(7, SeasonalWindow::Periodic);
        assert_eq!(p.resolved_trend_window(1096), 11);
        let p = StlParams::new(365, SeasonalWindow::Periodic);
        assert_eq!(p.resolved_trend_window(1096), 549);
    }

    #[test]
    fn parameter_errors() {
        let y = vec![1.0; 20];
        assert!(matches!(
            stl_decompose(&y, &StlParams::new(12, 7)),
            Err(Error::SeriesTooShort { period: Some(12), .. })
        ));
        assert!(stl_decompose(&y, &StlParams::new(4, 8)).is_err());
        assert!(stl_decompose(&y, &StlParams::new(4, 1)).is_err());
        assert!(stl_decompose(&y, &StlParams::new(1, 7)).is_err());
        let mut bad = y.clone();
        bad[3] = f64::NAN;
        assert!(matches!(
            stl_decompose(&bad, &StlParams::new(4, 7)),
            Err(Error::NonFinite { index: 3, .. })
        ));
    }

    #[test]
    fn constant_series() {
        let y = vec![4.5; 48];
        for params in [StlParams::new(6, 7), StlParams::new(6, SeasonalWindow::Periodic).robust()] {
            let fit = stl_decompose(&y, &params).unwrap();
            for i in 0..y.len() {
                assert!((fit.trend[i] - 4.5).abs() < 1e-9);
                assert!(fit.seasonal[i].abs() < 1e-9);
                assert!(fit.remainder[i].abs() < 1e-9);
            }
        }
    }

    #[test]
    fn seasonal_window_parsing() {
        assert_eq!("periodic".parse::<SeasonalWindow>().unwrap(), SeasonalWindow::Periodic);
        assert_eq!(" 13".parse::<SeasonalWindow>().unwrap(), SeasonalWindow::Span(13));
        assert!("x".parse::<SeasonalWindow>().is_err());
    }
}
