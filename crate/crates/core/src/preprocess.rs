//! Missing-value imputation and the Box-Cox power transform.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mstl::{retain_periods, MultiSeasonalSeries};

/// A Box-Cox parameter restricted to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BoxCoxLambda(f64);

impl BoxCoxLambda {
    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(Self(lambda))
        } else {
            Err(Error::invalid("lambda", format!("must lie in [0, 1], got {lambda}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `ln(x)` when lambda is zero, `(x^lambda - 1) / lambda` otherwise.
pub fn boxcox(values: &[f64], lambda: BoxCoxLambda) -> Result<Vec<f64>> {
    let l = lambda.0;
    values
        .iter()
        .enumerate()
        .map(|(index, &x)| {
            let y = if l == 0.0 {
                if x > 0.0 { x.ln() } else { f64::NAN }
            } else if l == 1.0 {
                x - 1.0
            } else {
                (x.powf(l) - 1.0) / l
            };
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::BoxCoxDomain { index, value: x, lambda: l })
            }
        })
        .collect()
}

/// Inverse of [`boxcox`].
pub fn inv_boxcox(values: &[f64], lambda: BoxCoxLambda) -> Result<Vec<f64>> {
    let l = lambda.0;
    values
        .iter()
        .enumerate()
        .map(|(index, &y)| {
            let x = if l == 0.0 {
                y.exp()
            } else if l == 1.0 {
                y + 1.0
            } else {
                let base = l * y + 1.0;
                if base < 0.0 { f64::NAN } else { base.powf(1.0 / l) }
            };
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::BoxCoxDomain { index, value: y, lambda: l })
            }
        })
        .collect()
}

/// Fills missing (NaN) observations.
///
/// Without usable seasonal periods the gaps are linearly interpolated, with
/// constant extrapolation at the edges. With periods, a Fourier regression on
/// the observed points gives a seasonal surrogate; the seasonally adjusted
/// observations are interpolated linearly and the surrogate is added back.
/// Observed values are returned untouched.
pub fn interpolate_missing(series: &MultiSeasonalSeries) -> Result<Vec<f64>> {
    let values = series.values();
    let n = values.len();
    let observed: Vec<usize> = (0..n).filter(|&i| !values[i].is_nan()).collect();
    if observed.len() < 2 {
        return Err(Error::InsufficientObservations {
            required: 2,
            found: observed.len(),
        });
    }
    if observed.len() == n {
        return Ok(values.to_vec());
    }
    let lead = observed[0];
    let trail = n - 1 - observed[observed.len() - 1];
    if lead > n / 2 || trail > n / 2 {
        return Err(Error::invalid(
            "values",
            format!("edge gap of {} points exceeds half the series", lead.max(trail)),
        ));
    }

    let periods = retain_periods(series.periods(), n);
    let surrogate = if periods.is_empty() {
        None
    } else {
        fourier_surrogate(values, &observed, &periods)
    };

    let adjusted: Vec<f64> = match &surrogate {
        Some(s) => values.iter().zip(s).map(|(v, s)| v - s).collect(),
        None => values.to_vec(),
    };
    let mut out = linear_fill(&adjusted, &observed);
    if let Some(s) = &surrogate {
        for (i, v) in out.iter_mut().enumerate() {
            if values[i].is_nan() {
                *v += s[i];
            }
        }
    }
    for &i in &observed {
        out[i] = values[i];
    }
    Ok(out)
}

fn linear_fill(values: &[f64], observed: &[usize]) -> Vec<f64> {
    let mut out = values.to_vec();
    let first = observed[0];
    let last = observed[observed.len() - 1];
    for v in &mut out[..first] {
        *v = values[first];
    }
    for v in &mut out[last + 1..] {
        *v = values[last];
    }
    for pair in observed.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a > 1 {
            let slope = (values[b] - values[a]) / (b - a) as f64;
            for i in a + 1..b {
                out[i] = values[a] + slope * (i - a) as f64;
            }
        }
    }
    out
}

/// Seasonal part of a least-squares fit on an intercept, a linear time term
/// and up to five harmonic pairs per period. `None` when the regression is
/// underdetermined.
fn fourier_surrogate(values: &[f64], observed: &[usize], periods: &[usize]) -> Option<Vec<f64>> {
    let n = values.len();
    let mut terms: Vec<(usize, usize, bool)> = Vec::new();
    for &p in periods {
        for k in 1..=(p / 2).min(5) {
            terms.push((p, k, false));
            if 2 * k != p {
                terms.push((p, k, true));
            }
        }
    }
    let cols = 2 + terms.len();
    if observed.len() <= cols {
        return None;
    }
    let basis = |t: usize, (p, k, sine): (usize, usize, bool)| {
        let arg = 2.0 * PI * (k * (t % p)) as f64 / p as f64;
        if sine { arg.sin() } else { arg.cos() }
    };
    let scale = (n - 1).max(1) as f64;
    let design = DMatrix::from_fn(observed.len(), cols, |r, c| {
        let t = observed[r];
        match c {
            0 => 1.0,
            1 => t as f64 / scale,
            _ => basis(t, terms[c - 2]),
        }
    });
    let rhs = DVector::from_iterator(observed.len(), observed.iter().map(|&i| values[i]));
    let coef = design.svd(true, true).solve(&rhs, 1e-10).ok()?;

    Some(
        (0..n)
            .map(|t| {
                terms
                    .iter()
                    .enumerate()
                    .map(|(j, &term)| coef[j + 2] * basis(t, term))
                    .sum()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn lam(l: f64) -> BoxCoxLambda {
        BoxCoxLambda::new(l).unwrap()
    }

    #[test]
    fn boxcox_examples() {
        let y = boxcox(&[1.0, E, E * E], lam(0.0)).unwrap();
        for (a, b) in y.iter().zip([0.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(boxcox(&[1.0, 2.0, 3.0], lam(1.0)).unwrap(), vec![0.0, 1.0, 2.0]);
        assert_eq!(boxcox(&[4.0], lam(0.5)).unwrap(), vec![2.0]);
    }

    #[test]
    fn boxcox_domain_errors() {
        let err = boxcox(&[1.0, 0.0, 2.0], lam(0.0)).unwrap_err();
        assert!(matches!(err, Error::BoxCoxDomain { index: 1, .. }));
        assert!(boxcox(&[-1.0], lam(0.5)).is_err());
        assert!(boxcox(&[-1.0], lam(1.0)).is_ok());
        assert!(BoxCoxLambda::new(1.5).is_err());
        assert!(BoxCoxLambda::new(-0.1).is_err());
        assert!(inv_boxcox(&[-5.0], lam(0.5)).is_err());
    }

    #[test]
    fn inverse_examples() {
        for l in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(inv_boxcox(&[0.0], lam(l)).unwrap(), vec![1.0]);
        }
        assert_eq!(inv_boxcox(&[2.0], lam(0.5)).unwrap(), vec![4.0]);
        let x = [0.5, 1.5, 9.2];
        let back = inv_boxcox(&boxcox(&x, lam(0.3)).unwrap(), lam(0.3)).unwrap();
        for (a, b) in back.iter().zip(x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_midpoint() {
        let s = MultiSeasonalSeries::new(vec![1.0, f64::NAN, 3.0], vec![]).unwrap();
        assert_eq!(interpolate_missing(&s).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn edge_gaps_extrapolate_constant() {
        let s = MultiSeasonalSeries::new(vec![f64::NAN, 2.0, 4.0, f64::NAN], vec![]).unwrap();
        assert_eq!(interpolate_missing(&s).unwrap(), vec![2.0, 2.0, 4.0, 4.0]);
    }

    #[test]
    fn complete_series_unchanged() {
        let v: Vec<f64> = (0..30).map(|t| (t as f64).sin()).collect();
        let s = MultiSeasonalSeries::new(v.clone(), vec![7]).unwrap();
        assert_eq!(interpolate_missing(&s).unwrap(), v);
    }

    #[test]
    fn insufficient_observations() {
        let s = MultiSeasonalSeries::new(vec![f64::NAN, 1.0, f64::NAN], vec![]).unwrap();
        assert!(matches!(
            interpolate_missing(&s),
            Err(Error::InsufficientObservations { found: 1, .. })
        ));
        let s = MultiSeasonalSeries::new(
            vec![f64::NAN, f64::NAN, f64::NAN, f64::NAN, 1.0, 2.0],
            vec![],
        )
        .unwrap();
        assert!(interpolate_missing(&s).is_err());
    }

    #[test]
    fn sawtooth_recovered_exactly() {
        let truth: Vec<f64> = (0..80).map(|t| (t % 4) as f64).collect();
        let mut v = truth.clone();
        for i in [3, 10, 17, 22, 35, 41, 50, 63] {
            v[i] = f64::NAN;
        }
        let s = MultiSeasonalSeries::new(v, vec![4]).unwrap();
        let filled = interpolate_missing(&s).unwrap();
        for (a, b) in filled.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}
