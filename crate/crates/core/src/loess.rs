//! Tricube-weighted local polynomial regression.
//!
//! This is the smoothing kernel used by every stage of STL. A fit at a
//! target position uses the `window_width` nearest observations, weighted by
//! the tricube of their distance relative to the neighbourhood half-width and
//! multiplied by optional robustness weights. When the window is wider than
//! the series, the half-width is widened by `(q - n) / 2` spacings, which is
//! the convention of the reference STL implementation.

use crate::error::{Error, Result};

/// Configuration for a single loess smoother.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoessConfig {
    window_width: usize,
    degree: usize,
    jump: usize,
}

impl LoessConfig {
    pub fn new(window_width: usize, degree: usize, jump: usize) -> Result<Self> {
        if degree > 2 {
            return Err(Error::invalid("degree", format!("must be 0, 1 or 2, got {degree}")));
        }
        if window_width.is_multiple_of(2) {
            return Err(Error::invalid(
                "window_width",
                format!("must be odd, got {window_width}"),
            ));
        }
        if window_width < degree + 1 {
            return Err(Error::invalid(
                "window_width",
                format!("{window_width} is too small for degree {degree}"),
            ));
        }
        if jump == 0 {
            return Err(Error::invalid("jump", "must be at least 1"));
        }
        Ok(Self {
            window_width,
            degree,
            jump,
        })
    }

    pub fn window_width(&self) -> usize {
        self.window_width
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn jump(&self) -> usize {
        self.jump
    }

    /// Same window and degree, evaluated at every point.
    pub fn without_jump(mut self) -> Self {
        self.jump = 1;
        self
    }
}

#[derive(Debug, Clone, Copy)]
enum Positions<'a> {
    /// Positions `1, 2, ..., n`.
    Regular,
    Explicit(&'a [f64]),
}

/// Observations to be smoothed, with their positions and robustness weights.
#[derive(Debug, Clone, Copy)]
pub struct WeightedSeries<'a> {
    positions: Positions<'a>,
    values: &'a [f64],
    robustness_weights: Option<&'a [f64]>,
}

impl<'a> WeightedSeries<'a> {
    /// Values observed at the positions `1..=n`.
    pub fn regular(values: &'a [f64]) -> Self {
        Self {
            positions: Positions::Regular,
            values,
            robustness_weights: None,
        }
    }

    /// Values observed at arbitrary strictly increasing positions.
    pub fn with_positions(positions: &'a [f64], values: &'a [f64]) -> Result<Self> {
        if positions.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                actual: positions.len(),
            });
        }
        crate::error::ensure_finite(positions)?;
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("positions", "must be strictly increasing"));
        }
        Ok(Self {
            positions: Positions::Explicit(positions),
            values,
            robustness_weights: None,
        })
    }

    /// Attaches robustness weights (one non-negative weight per observation).
    pub fn with_weights(mut self, weights: &'a [f64]) -> Result<Self> {
        if weights.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                actual: weights.len(),
            });
        }
        if let Some(i) = weights.iter().position(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::invalid(
                "robustness_weights",
                format!("weight {} at index {i} is negative or NaN", weights[i]),
            ));
        }
        self.robustness_weights = Some(weights);
        Ok(self)
    }

    pub(crate) fn weights_unchecked(mut self, weights: Option<&'a [f64]>) -> Self {
        self.robustness_weights = weights;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    fn unweighted(&self) -> Self {
        Self {
            robustness_weights: None,
            ..*self
        }
    }

    #[inline]
    fn x(&self, i: usize) -> f64 {
        match self.positions {
            Positions::Regular => (i + 1) as f64,
            Positions::Explicit(p) => p[i],
        }
    }

    #[inline]
    fn rw(&self, i: usize) -> f64 {
        self.robustness_weights.map_or(1.0, |w| w[i])
    }

    fn span(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            0.0
        } else {
            self.x(n - 1) - self.x(0)
        }
    }

    /// Start index of the `q` nearest neighbours of `at` (`q <= n`).
    fn window_start(&self, at: f64, q: usize) -> usize {
        let n = self.len();
        match self.positions {
            Positions::Regular => {
                let centre = at.round() - 1.0 - ((q - 1) / 2) as f64;
                centre.clamp(0.0, (n - q) as f64) as usize
            }
            Positions::Explicit(p) => {
                let mut right = p.partition_point(|&x| x < at);
                let mut left = right;
                while right - left < q {
                    if left > 0 && (right == n || at - p[left - 1] <= p[right] - at) {
                        left -= 1;
                    } else {
                        right += 1;
                    }
                }
                left
            }
        }
    }
}

/// Tricube kernel `(1 - |u|^3)^3` on `|u| < 1`, zero elsewhere.
#[inline]
pub fn tricube_weight(u: f64) -> f64 {
    let a = u.abs();
    if a < 1.0 {
        let t = 1.0 - a * a * a;
        t * t * t
    } else {
        0.0
    }
}

/// Fitted value at `at` from a local polynomial regression.
///
/// Fails with [`Error::DegenerateNeighborhood`] when every weight in the
/// neighbourhood is zero.
pub fn loess_fit_point(series: &WeightedSeries<'_>, at: f64, cfg: &LoessConfig) -> Result<f64> {
    let n = series.len();
    if n == 0 {
        return Err(Error::SeriesTooShort {
            len: 0,
            required: 1,
            period: None,
        });
    }
    let q = cfg.window_width.min(n);
    let start = series.window_start(at, q);
    let end = start + q;

    let mut h = (at - series.x(start)).max(series.x(end - 1) - at);
    if cfg.window_width > n {
        let spacing = if n > 1 { series.span() / (n - 1) as f64 } else { 1.0 };
        h += ((cfg.window_width - n) / 2) as f64 * spacing;
    }

    // Moments of the weighted design, centred at the target.
    let mut m = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for i in start..end {
        let d = series.x(i) - at;
        let k = if h > 0.0 {
            tricube_weight(d / h)
        } else if d == 0.0 {
            1.0
        } else {
            0.0
        };
        let w = k * series.rw(i);
        if w == 0.0 {
            continue;
        }
        let y = series.values[i];
        m[0] += w;
        t[0] += w * y;
        if cfg.degree > 0 {
            let d2 = d * d;
            m[1] += w * d;
            m[2] += w * d2;
            t[1] += w * d * y;
            if cfg.degree > 1 {
                m[3] += w * d2 * d;
                m[4] += w * d2 * d2;
                t[2] += w * d2 * y;
            }
        }
    }
    if m[0].is_nan() || m[0] <= 0.0 {
        return Err(Error::DegenerateNeighborhood { at });
    }

    if cfg.degree == 2 {
        if let Some(fit) = solve_quadratic(&m, &t, h) {
            return Ok(fit);
        }
    }
    if cfg.degree >= 1 {
        let mean_d = m[1] / m[0];
        let var = m[2] / m[0] - mean_d * mean_d;
        if var > 0.0 && var.sqrt() > 1e-3 * series.span() {
            let mean_y = t[0] / m[0];
            let cov = t[1] / m[0] - mean_d * mean_y;
            return Ok(mean_y - mean_d * cov / var);
        }
    }
    Ok(t[0] / m[0])
}

/// Intercept of the weighted quadratic fit, or `None` when the 3x3 system is
/// numerically singular.
fn solve_quadratic(m: &[f64; 5], t: &[f64; 3], h: f64) -> Option<f64> {
    // Rescale d -> d / h so the moments are O(1).
    let s = if h > 0.0 { 1.0 / h } else { 1.0 };
    let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
    let (a0, a1, a2, a3, a4) = (m[0], m[1] * s, m[2] * s2, m[3] * s3, m[4] * s4);
    let (b0, b1, b2) = (t[0], t[1] * s, t[2] * s2);

    let det = a0 * (a2 * a4 - a3 * a3) - a1 * (a1 * a4 - a3 * a2) + a2 * (a1 * a3 - a2 * a2);
    let scale = a0 * a2 * a4;
    if scale.is_nan() || scale <= 0.0 || det.abs() <= 1e-10 * scale {
        return None;
    }
    let num = b0 * (a2 * a4 - a3 * a3) - a1 * (b1 * a4 - a3 * b2) + a2 * (b1 * a3 - a2 * b2);
    Some(num / det)
}

/// Fit with the robustness weights, falling back to the unweighted tricube fit
/// when the weighted neighbourhood is empty.
pub(crate) fn fit_point_with_fallback(
    series: &WeightedSeries<'_>,
    at: f64,
    cfg: &LoessConfig,
) -> Result<f64> {
    match loess_fit_point(series, at, cfg) {
        Err(Error::DegenerateNeighborhood { .. }) if series.robustness_weights.is_some() => {
            loess_fit_point(&series.unweighted(), at, cfg)
        }
        other => other,
    }
}

/// Smooths the whole series, evaluating directly every `jump` points and at
/// both endpoints, and linearly interpolating in between.
pub fn loess_smooth(series: &WeightedSeries<'_>, cfg: &LoessConfig) -> Result<Vec<f64>> {
    let mut out = vec![0.0; series.len()];
    loess_smooth_into(series, cfg, &mut out)?;
    Ok(out)
}

pub(crate) fn loess_smooth_into(
    series: &WeightedSeries<'_>,
    cfg: &LoessConfig,
    out: &mut [f64],
) -> Result<()> {
    let n = series.len();
    debug_assert_eq!(out.len(), n);
    if n == 0 {
        return Ok(());
    }
    let jump = cfg.jump.min((n - 1).max(1));

    let mut prev: Option<usize> = None;
    let mut i = 0;
    loop {
        out[i] = fit_point_with_fallback(series, series.x(i), cfg)?;
        if let Some(p) = prev {
            if i - p > 1 {
                let (x0, x1) = (series.x(p), series.x(i));
                let (y0, y1) = (out[p], out[i]);
                let slope = (y1 - y0) / (x1 - x0);
                for j in p + 1..i {
                    out[j] = y0 + slope * (series.x(j) - x0);
                }
            }
        }
        if i == n - 1 {
            break;
        }
        prev = Some(i);
        i = (i + jump).min(n - 1);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(q: usize, d: usize) -> LoessConfig {
        LoessConfig::new(q, d, 1).unwrap()
    }

    #[test]
    fn tricube_values() {
        assert_eq!(tricube_weight(0.0), 1.0);
        assert_eq!(tricube_weight(1.0), 0.0);
        assert_eq!(tricube_weight(-1.5), 0.0);
        assert_eq!(tricube_weight(0.5), 0.669921875);
        assert_eq!(tricube_weight(-0.5), 0.669921875);
    }

    #[test]
    fn config_validation() {
        assert!(LoessConfig::new(4, 1, 1).is_err());
        assert!(LoessConfig::new(1, 1, 1).is_err());
        assert!(LoessConfig::new(3, 3, 1).is_err());
        assert!(LoessConfig::new(3, 2, 0).is_err());
        assert!(LoessConfig::new(3, 2, 1).is_ok());
        assert!(LoessConfig::new(1, 0, 1).is_ok());
    }

    #[test]
    fn constant_is_fixed_point() {
        let y = vec![3.25; 17];
        for d in 0..=2 {
            for q in [3, 5, 9, 31] {
                let s = WeightedSeries::regular(&y);
                let fit = loess_smooth(&s, &LoessConfig::new(q, d, 3).unwrap()).unwrap();
                for v in fit {
                    assert!((v - 3.25).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_reproduction() {
        let y: Vec<f64> = (1..=25).map(|t| 0.7 * t as f64 - 4.0).collect();
        let s = WeightedSeries::regular(&y);
        for q in [3, 7, 13, 41] {
            for at in [0.0, 1.0, 12.5, 25.0, 26.0] {
                let v = loess_fit_point(&s, at, &cfg(q, 1)).unwrap();
                assert!((v - (0.7 * at - 4.0)).abs() < 1e-10, "q={q} at={at} v={v}");
            }
        }
    }

    #[test]
    fn quadratic_reproduction() {
        let y: Vec<f64> = (1..=30).map(|t| {
            let t = t as f64;
            0.05 * t * t - t + 2.0
        }).collect();
        let s = WeightedSeries::regular(&y);
        let fit = loess_smooth(&s, &cfg(9, 2)).unwrap();
        for (a, b) in fit.iter().zip(&y) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn seven_point_example() {
        // Symmetric window 2..=6, half-width 2: outer points get zero weight,
        // inner neighbours 0.669921875, so the fit is their weighted mean.
        let y = [2.0, 1.0, 3.0, 5.0, 4.0, 6.0, 8.0];
        let v = loess_fit_point(&WeightedSeries::regular(&y), 4.0, &cfg(5, 1)).unwrap();
        assert!((v - 4.141068447412354).abs() < 1e-12);
    }

    #[test]
    fn degenerate_window_errors_and_smooth_falls_back() {
        let y = [1.0, 2.0, 3.0, 4.0, 5.0];
        let w = [1.0, 0.0, 0.0, 0.0, 1.0];
        let s = WeightedSeries::regular(&y).with_weights(&w).unwrap();
        let err = loess_fit_point(&s, 3.0, &cfg(3, 1)).unwrap_err();
        assert!(matches!(err, Error::DegenerateNeighborhood { .. }));
        let fit = loess_smooth(&s, &cfg(3, 1)).unwrap();
        assert!((fit[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jump_interpolates_between_evaluated_points() {
        let y: Vec<f64> = (0..60).map(|t| ((t as f64) / 9.0).sin()).collect();
        let s = WeightedSeries::regular(&y);
        let full = loess_smooth(&s, &cfg(11, 1)).unwrap();
        let jumped = loess_smooth(&s, &LoessConfig::new(11, 1, 4).unwrap()).unwrap();
        for i in (0..60).step_by(4) {
            assert_eq!(full[i], jumped[i]);
        }
        assert_eq!(full[59], jumped[59]);
    }

    #[test]
    fn explicit_positions_window_selection() {
        let x = [0.0, 1.0, 1.5, 4.0, 10.0];
        let y = [1.0, 2.0, 3.0, 4.0, 5.0];
        let s = WeightedSeries::with_positions(&x, &y).unwrap();
        assert_eq!(s.window_start(1.2, 3), 0);
        assert_eq!(s.window_start(3.0, 3), 1);
        assert_eq!(s.window_start(12.0, 2), 3);
        assert!(WeightedSeries::with_positions(&[1.0, 1.0], &[0.0, 0.0]).is_err());
    }
}
