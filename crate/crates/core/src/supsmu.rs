//! Friedman's variable-span super smoother.
//!
//! Three running-line smoothers (tweeter, midrange, woofer) are fitted with
//! leave-one-out residuals. The residual curves are smoothed, the best span
//! is picked at every point, the span sequence is itself smoothed, and the
//! final curve interpolates between the two neighbouring span fits before a
//! last pass with the tweeter span. Observations are assumed equally spaced
//! at `1..=n`.

use crate::error::{ensure_finite, Error, Result};

const SMALL: f64 = 1e-7;
const EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupsmuConfig {
    /// Tweeter, midrange and woofer spans as fractions of the series length.
    pub spans: [f64; 3],
    /// Bass enhancement in `[0, 10]`; larger values favour the woofer span.
    pub bass: f64,
}

impl Default for SupsmuConfig {
    fn default() -> Self {
        Self {
            spans: [0.05, 0.2, 0.5],
            bass: 0.0,
        }
    }
}

impl SupsmuConfig {
    pub fn validate(&self) -> Result<()> {
        let [a, b, c] = self.spans;
        if !(a > 0.0 && a < b && b < c && c <= 1.0) {
            return Err(Error::invalid(
                "spans",
                format!("need 0 < s1 < s2 < s3 <= 1, got {:?}", self.spans),
            ));
        }
        if !(0.0..=10.0).contains(&self.bass) {
            return Err(Error::invalid("bass", format!("must lie in [0, 10], got {}", self.bass)));
        }
        Ok(())
    }
}

/// Running weighted-free line fit with O(1) window updates.
struct Window {
    n: f64,
    xm: f64,
    ym: f64,
    var: f64,
    cov: f64,
}

impl Window {
    fn new() -> Self {
        Self { n: 0.0, xm: 0.0, ym: 0.0, var: 0.0, cov: 0.0 }
    }

    fn add(&mut self, x: f64, y: f64) {
        let before = self.n;
        self.n += 1.0;
        self.xm = (before * self.xm + x) / self.n;
        self.ym = (before * self.ym + y) / self.n;
        if before > 0.0 {
            let t = self.n * (x - self.xm) / before;
            self.var += t * (x - self.xm);
            self.cov += t * (y - self.ym);
        }
    }

    fn remove(&mut self, x: f64, y: f64) {
        let before = self.n;
        self.n -= 1.0;
        if self.n > 0.0 {
            let t = before * (x - self.xm) / self.n;
            self.var -= t * (x - self.xm);
            self.cov -= t * (y - self.ym);
            self.xm = (before * self.xm - x) / self.n;
            self.ym = (before * self.ym - y) / self.n;
        }
    }
}

/// Running-line smoother over windows of `2 * half_width + 1` points
/// (clamped at the ends). Returns the fit and, if requested, absolute
/// leave-one-out residuals.
fn running_line(
    x: &[f64],
    y: &[f64],
    half_width: usize,
    min_var: f64,
    cv: bool,
) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let width = (2 * half_width + 1).min(n);
    let mut win = Window::new();
    for i in 0..width {
        win.add(x[i], y[i]);
    }
    let mut fit = vec![0.0; n];
    let mut resid = if cv { vec![0.0; n] } else { Vec::new() };
    for j in 0..n {
        if j > half_width && j + half_width < n {
            let out = j - half_width - 1;
            let inc = j + half_width;
            win.remove(x[out], y[out]);
            win.add(x[inc], y[inc]);
        }
        let slope = if win.var > min_var { win.cov / win.var } else { 0.0 };
        fit[j] = slope * (x[j] - win.xm) + win.ym;
        if cv {
            let mut h = 1.0 / win.n;
            if win.var > min_var {
                h += (x[j] - win.xm).powi(2) / win.var;
            }
            let denom = 1.0 - h;
            resid[j] = if denom > 0.0 {
                (y[j] - fit[j]).abs() / denom
            } else if j > 0 {
                resid[j - 1]
            } else {
                0.0
            };
        }
    }
    (fit, resid)
}

fn index_positions(n: usize) -> Vec<f64> {
    (1..=n).map(|t| t as f64).collect()
}

fn min_variance(x: &[f64]) -> f64 {
    let n = x.len();
    let (mut lo, mut hi) = (n / 4, (3 * n / 4).min(n - 1));
    let mut scale = x[hi] - x[lo];
    while scale <= 0.0 && (lo > 0 || hi + 1 < n) {
        hi = (hi + 1).min(n - 1);
        lo = lo.saturating_sub(1);
        scale = x[hi] - x[lo];
    }
    (EPS * scale).powi(2)
}

fn half_width_for(span: f64, n: usize) -> usize {
    ((0.5 * span * n as f64 + 0.5) as usize).max(2)
}

/// Symmetric nearest-neighbour running least-squares line through windows of
/// `span_count` points, with leave-one-out absolute residuals.
pub fn running_linear_smooth(x: &[f64], y: &[f64], span_count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: y.len() });
    }
    if span_count < 3 || span_count.is_multiple_of(2) || span_count > n {
        return Err(Error::invalid(
            "span_count",
            format!("must be odd and within 3..={n}, got {span_count}"),
        ));
    }
    ensure_finite(x)?;
    ensure_finite(y)?;
    if x.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("x", "must be sorted ascending"));
    }
    Ok(running_line(x, y, (span_count - 1) / 2, min_variance(x), true))
}

/// Super-smoother trend of an equally spaced series.
pub fn supsmu_smooth(values: &[f64], cfg: &SupsmuConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    ensure_finite(values)?;
    let n = values.len();
    if n < 3 {
        let mean = values.iter().sum::<f64>() / n.max(1) as f64;
        return Ok(vec![mean; n]);
    }
    let x = index_positions(n);
    let min_var = min_variance(&x);
    let [tweeter, midrange, woofer] = cfg.spans;
    let mid_hw = half_width_for(midrange, n);

    if n < 10 {
        return Ok(running_line(&x, values, mid_hw, min_var, false).0);
    }

    let mut fits: Vec<Vec<f64>> = Vec::with_capacity(3);
    let mut cv: Vec<Vec<f64>> = Vec::with_capacity(3);
    for span in cfg.spans {
        let (fit, resid) = running_line(&x, values, half_width_for(span, n), min_var, true);
        let (smoothed_resid, _) = running_line(&x, &resid, mid_hw, min_var, false);
        fits.push(fit);
        cv.push(smoothed_resid);
    }

    let mut chosen = vec![0.0; n];
    for j in 0..n {
        let mut best = f64::INFINITY;
        for (i, span) in cfg.spans.iter().enumerate() {
            // `<=` breaks ties toward the larger span.
            if cv[i][j] <= best {
                best = cv[i][j];
                chosen[j] = *span;
            }
        }
        let woofer_resid = cv[2][j];
        if cfg.bass > 0.0 && best < woofer_resid && best > 0.0 {
            let f = (best / woofer_resid).max(SMALL).powf(10.0 - cfg.bass);
            chosen[j] += (woofer - chosen[j]) * f;
        }
    }
    let (span_curve, _) = running_line(&x, &chosen, mid_hw, min_var, false);

    let blended: Vec<f64> = (0..n)
        .map(|j| {
            let s = span_curve[j].clamp(tweeter, woofer);
            let f = s - midrange;
            if f < 0.0 {
                let f = -f / (midrange - tweeter);
                (1.0 - f) * fits[1][j] + f * fits[0][j]
            } else {
                let f = f / (woofer - midrange);
                (1.0 - f) * fits[1][j] + f * fits[2][j]
            }
        })
        .collect();
    Ok(running_line(&x, &blended, half_width_for(tweeter, n), min_var, false).0)
}
