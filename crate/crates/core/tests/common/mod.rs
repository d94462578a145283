//! Independent reference implementations shared by the test targets.
#![allow(dead_code)]

use mstlkit::loess::tricube_weight;
use nalgebra::{DMatrix, DVector};

/// Weighted least squares by dense normal equations, with the bandwidth
/// taken as the distance to the q-th nearest position.
pub fn dense_oracle(x: &[f64], y: &[f64], rw: &[f64], at: f64, q: usize, degree: usize) -> f64 {
    let mut dist: Vec<f64> = x.iter().map(|xi| (xi - at).abs()).collect();
    dist.sort_by(f64::total_cmp);
    let h = dist[q - 1];
    let cols = degree + 1;
    let mut xtwx = DMatrix::<f64>::zeros(cols, cols);
    let mut xtwy = DVector::<f64>::zeros(cols);
    for i in 0..x.len() {
        let d = x[i] - at;
        let w = tricube_weight(d / h) * rw[i];
        let row: Vec<f64> = (0..cols).map(|k| d.powi(k as i32)).collect();
        for a in 0..cols {
            xtwy[a] += w * row[a] * y[i];
            for b in 0..cols {
                xtwx[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    xtwx.lu().solve(&xtwy).expect("nonsingular oracle system")[0]
}

/// Direct least-squares line through each clamped window, with the
/// leave-one-out residual from the hat diagonal.
pub fn window_oracle(x: &[f64], y: &[f64], span: usize) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = span / 2;
    let mut fit = Vec::with_capacity(n);
    let mut cv = Vec::with_capacity(n);
    for j in 0..n {
        let start = j.saturating_sub(half).min(n - span);
        let xs = &x[start..start + span];
        let ys = &y[start..start + span];
        let m = span as f64;
        let xm = xs.iter().sum::<f64>() / m;
        let ym = ys.iter().sum::<f64>() / m;
        let sxx: f64 = xs.iter().map(|v| (v - xm).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(a, b)| (a - xm) * (b - ym)).sum();
        let f = ym + sxy / sxx * (x[j] - xm);
        let h = 1.0 / m + (x[j] - xm).powi(2) / sxx;
        fit.push(f);
        cv.push((y[j] - f).abs() / (1.0 - h));
    }
    (fit, cv)
}

pub fn per_phase_means(values: &[f64], period: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(period);
    for phase in 0..period {
        let mut sum = 0.0;
        let mut count = 0.0;
        let mut i = phase;
        while i < values.len() {
            sum += values[i];
            count += 1.0;
            i += period;
        }
        out.push(sum / count);
    }
    out
}

pub fn contains_run(haystack: &[f64], needle: &[f64]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}

/// True when some head offset makes every complete block of `out` a
/// contiguous run of `input`.
pub fn block_provenance(input: &[f64], out: &[f64], l: usize) -> bool {
    (0..l).any(|offset| {
        let first = (l - offset) % l;
        let mut start = first;
        let mut ok = first == 0 || contains_run(input, &out[..first]);
        while ok && start + l <= out.len() {
            ok = contains_run(input, &out[start..start + l]);
            start += l;
        }
        ok && (start >= out.len() || contains_run(input, &out[start..]))
    })
}
