//! Synthetic series with known trend, seasonal and remainder components.
//!
//! A series is `T + alpha * S_short + beta * S_long + gamma * R`, where the
//! trend is quadratic (deterministic) or a twice-integrated random walk
//! (stochastic), each seasonal is a five-harmonic Fourier pattern whose
//! coefficients may drift from cycle to cycle, and `R` is white noise. Trend
//! and seasonals are normalised to zero mean and unit variance.
//!
//! Randomness comes from ChaCha8 seeded with the configured seed. Each
//! component reads from its own ChaCha stream (see [`Stream`]), so for a
//! fixed seed the trend does not change when, say, `sigma2` does.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HARMONICS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dgp {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    /// Weekly and yearly cycles (7, 365); default length 365 * 3 + 1.
    Daily,
    /// Daily and weekly cycles (24, 168); default length 168 * 3 + 1.
    Hourly,
}

impl Frequency {
    pub fn periods(self) -> [usize; 2] {
        match self {
            Frequency::Daily => [7, 365],
            Frequency::Hourly => [24, 168],
        }
    }

    pub fn default_length(self) -> usize {
        3 * self.periods()[1] + 1
    }
}

/// How stochastic seasonal coefficients change between cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeasonalNoise {
    /// Increments accumulate from cycle to cycle.
    #[default]
    RandomWalk,
    /// Each cycle perturbs the initial coefficients independently.
    Iid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub dgp: Dgp,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub frequency: Frequency,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    pub seed: u64,
    #[serde(default)]
    pub seasonal_noise: SeasonalNoise,
}

impl SimulationConfig {
    pub fn new(dgp: Dgp, frequency: Frequency, gamma: f64, sigma2: f64, seed: u64) -> Self {
        Self {
            dgp,
            alpha: 1.0,
            beta: 1.0,
            gamma,
            sigma2,
            frequency,
            length: None,
            seed,
            seasonal_noise: SeasonalNoise::default(),
        }
    }

    /// The six `(dgp, alpha, beta, gamma, sigma2)` settings of the simulation study.
    pub fn study_settings() -> [(Dgp, f64, f64, f64, f64); 6] {
        [
            (Dgp::Deterministic, 1.0, 1.0, 0.2, 0.0),
            (Dgp::Deterministic, 1.0, 1.0, 0.4, 0.0),
            (Dgp::Deterministic, 1.0, 1.0, 0.6, 0.0),
            (Dgp::Stochastic, 1.0, 1.0, 0.2, 0.025),
            (Dgp::Stochastic, 1.0, 1.0, 0.4, 0.050),
            (Dgp::Stochastic, 1.0, 1.0, 0.6, 0.075),
        ]
    }

    pub fn resolved_length(&self) -> usize {
        self.length.unwrap_or_else(|| self.frequency.default_length())
    }

    pub fn periods(&self) -> [usize; 2] {
        self.frequency.periods()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::invalid("sigma2", format!("must be non-negative, got {}", self.sigma2)));
        }
        if self.dgp == Dgp::Deterministic && self.sigma2 != 0.0 {
            return Err(Error::invalid("sigma2", "must be 0 for the deterministic process"));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.resolved_length() < 3 {
            return Err(Error::invalid("length", "must be at least 3"));
        }
        Ok(())
    }
}

/// A simulated series and the components it was built from (unweighted).
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub composite: Vec<f64>,
    pub trend: Vec<f64>,
    pub seasonal_short: Vec<f64>,
    pub seasonal_long: Vec<f64>,
    pub remainder: Vec<f64>,
    pub config: SimulationConfig,
}

/// RNG streams used for the components of one series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Trend = 0,
    SeasonalShort = 1,
    SeasonalLong = 2,
    Remainder = 3,
}

/// ChaCha8 generator for one component of the series with the given seed.
pub fn component_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Rescales to zero mean and unit sample variance (denominator `n - 1`).
/// A constant input is only centred.
pub fn normalize(values: &mut [f64]) {
    let n = values.len();
    if n == 0 {
        return;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter_mut().for_each(|v| *v -= mean);
    if n < 2 {
        return;
    }
    let var = values.iter().map(|v| v * v).sum::<f64>() / (n - 1) as f64;
    if var > 0.0 {
        let sd = var.sqrt();
        values.iter_mut().for_each(|v| *v /= sd);
    }
}

/// `n1 * (t + length/2 * (n2 - 1))^2` for `t = 1..=length`, before normalisation.
pub fn quadratic_trend(length: usize, n1: f64, n2: f64) -> Vec<f64> {
    let shift = length as f64 / 2.0 * (n2 - 1.0);
    (1..=length)
        .map(|t| {
            let u = t as f64 + shift;
            n1 * u * u
        })
        .collect()
}

/// Renders `sum_k a_k sin(2 pi k t / p) + b_k cos(2 pi k t / p)` at `t = 1..=length`
/// with `coefficients[k - 1] = (a_k, b_k)`.
pub fn fourier_seasonal(length: usize, period: usize, coefficients: &[(f64, f64)]) -> Vec<f64> {
    (1..=length).map(|t| fourier_value(t, period, coefficients)).collect()
}

fn fourier_value(t: usize, period: usize, coefficients: &[(f64, f64)]) -> f64 {
    let phase = (t % period) as f64 / period as f64;
    coefficients
        .iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let arg = 2.0 * PI * (k + 1) as f64 * phase;
            a * arg.sin() + b * arg.cos()
        })
        .sum()
}

/// Doubly integrated shocks: `T_t = 2 T_{t-1} - T_{t-2} + e_t`, starting from zeros.
pub fn integrate_twice(shocks: &[f64]) -> Vec<f64> {
    let (mut prev2, mut prev1) = (0.0, 0.0);
    shocks
        .iter()
        .map(|e| {
            let v = 2.0 * prev1 - prev2 + e;
            prev2 = prev1;
            prev1 = v;
            v
        })
        .collect()
}

pub fn gen_deterministic_trend<R: Rng + ?Sized>(length: usize, rng: &mut R) -> Result<Vec<f64>> {
    if length < 2 {
        return Err(Error::invalid("length", "must be at least 2"));
    }
    let (n1, n2) = loop {
        let n1 = normal(rng);
        let n2 = normal(rng);
        if n1 != 0.0 {
            break (n1, n2);
        }
    };
    let mut trend = quadratic_trend(length, n1, n2);
    normalize(&mut trend);
    Ok(trend)
}

fn draw_coefficients<R: Rng + ?Sized>(rng: &mut R) -> Vec<(f64, f64)> {
    (0..HARMONICS).map(|_| (normal(rng), normal(rng))).collect()
}

pub fn gen_deterministic_seasonal<R: Rng + ?Sized>(
    length: usize,
    period: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if period < 2 {
        return Err(Error::invalid("period", "must be at least 2"));
    }
    let coef = draw_coefficients(rng);
    let mut s = fourier_seasonal(length, period, &coef);
    normalize(&mut s);
    Ok(s)
}

pub fn gen_stochastic_trend<R: Rng + ?Sized>(length: usize, rng: &mut R) -> Result<Vec<f64>> {
    if length < 3 {
        return Err(Error::invalid("length", "must be at least 3"));
    }
    let shocks: Vec<f64> = (0..length).map(|_| normal(rng)).collect();
    let mut trend = integrate_twice(&shocks);
    normalize(&mut trend);
    Ok(trend)
}

/// Fourier coefficients in force during each of `cycles` seasonal cycles.
///
/// The first cycle uses N(0, 1) draws; later cycles add independent
/// N(0, sigma2) increments, either cumulatively or to the initial draw.
pub fn coefficient_paths<R: Rng + ?Sized>(
    cycles: usize,
    sigma2: f64,
    noise: SeasonalNoise,
    rng: &mut R,
) -> Vec<Vec<(f64, f64)>> {
    let sd = sigma2.sqrt();
    let initial = draw_coefficients(rng);
    let mut current = initial.clone();
    let mut paths = Vec::with_capacity(cycles);
    for c in 0..cycles {
        if c > 0 {
            let base = match noise {
                SeasonalNoise::RandomWalk => current.clone(),
                SeasonalNoise::Iid => initial.clone(),
            };
            current = base
                .into_iter()
                .map(|(a, b)| (a + sd * normal(rng), b + sd * normal(rng)))
                .collect();
        }
        paths.push(current.clone());
    }
    paths
}

pub fn gen_stochastic_seasonal<R: Rng + ?Sized>(
    length: usize,
    period: usize,
    sigma2: f64,
    noise: SeasonalNoise,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if period < 2 {
        return Err(Error::invalid("period", "must be at least 2"));
    }
    if sigma2.is_nan() || sigma2 < 0.0 {
        return Err(Error::invalid("sigma2", "must be non-negative"));
    }
    let cycles = length.div_ceil(period);
    let paths = coefficient_paths(cycles, sigma2, noise, rng);
    let mut s: Vec<f64> = (1..=length)
        .map(|t| fourier_value(t, period, &paths[(t - 1) / period]))
        .collect();
    normalize(&mut s);
    Ok(s)
}

pub fn simulate_series(cfg: &SimulationConfig) -> Result<GroundTruth> {
    cfg.validate()?;
    let n = cfg.resolved_length();
    let [short, long] = cfg.periods();

    let mut trend_rng = component_rng(cfg.seed, Stream::Trend);
    let mut short_rng = component_rng(cfg.seed, Stream::SeasonalShort);
    let mut long_rng = component_rng(cfg.seed, Stream::SeasonalLong);
    let mut rem_rng = component_rng(cfg.seed, Stream::Remainder);

    let (trend, seasonal_short, seasonal_long) = match cfg.dgp {
        Dgp::Deterministic => (
            gen_deterministic_trend(n, &mut trend_rng)?,
            gen_deterministic_seasonal(n, short, &mut short_rng)?,
            gen_deterministic_seasonal(n, long, &mut long_rng)?,
        ),
        Dgp::Stochastic => (
            gen_stochastic_trend(n, &mut trend_rng)?,
            gen_stochastic_seasonal(n, short, cfg.sigma2, cfg.seasonal_noise, &mut short_rng)?,
            gen_stochastic_seasonal(n, long, cfg.sigma2, cfg.seasonal_noise, &mut long_rng)?,
        ),
    };
    let remainder: Vec<f64> = (0..n).map(|_| normal(&mut rem_rng)).collect();

    let composite = (0..n)
        .map(|t| {
            trend[t] + cfg.alpha * seasonal_short[t] + cfg.beta * seasonal_long[t]
                + cfg.gamma * remainder[t]
        })
        .collect();

    Ok(GroundTruth {
        composite,
        trend,
        seasonal_short,
        seasonal_long,
        remainder,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, var)
    }

    #[test]
    fn trend_formula_reduces_to_square() {
        assert_eq!(quadratic_trend(3, 1.0, 1.0), vec![1.0, 4.0, 9.0]);
    }

    #[test]
    fn normalised_components() {
        let mut rng = component_rng(11, Stream::Trend);
        for v in [
            gen_deterministic_trend(1096, &mut rng).unwrap(),
            gen_deterministic_seasonal(1096, 365, &mut rng).unwrap(),
            gen_stochastic_trend(505, &mut rng).unwrap(),
            gen_stochastic_seasonal(505, 24, 0.05, SeasonalNoise::RandomWalk, &mut rng).unwrap(),
        ] {
            let (m, var) = moments(&v);
            assert!(m.abs() < 1e-9);
            assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn quarter_point_sine() {
        let s = fourier_seasonal(8, 4, &[(1.0, 0.0), (0.0, 0.0)]);
        let expected = [1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0];
        for (a, b) in s.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_seasonal_is_periodic() {
        let s = gen_deterministic_seasonal(100, 7, &mut component_rng(3, Stream::SeasonalShort)).unwrap();
        for t in 0..93 {
            assert!((s[t] - s[t + 7]).abs() < 1e-9);
        }
    }

    #[test]
    fn integration_examples() {
        assert_eq!(integrate_twice(&[1.0, 0.0, 0.0, 0.0]), vec![1.0, 2.0, 3.0, 4.0]);
        let shocks: Vec<f64> = (0..50).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let t = integrate_twice(&shocks);
        // second differences with T_0 = T_{-1} = 0
        let mut ext = vec![0.0, 0.0];
        ext.extend(&t);
        for i in 0..shocks.len() {
            assert_eq!(ext[i + 2] - 2.0 * ext[i + 1] + ext[i], shocks[i]);
        }
    }

    #[test]
    fn zero_sigma_matches_deterministic_seasonal() {
        let a = gen_deterministic_seasonal(505, 24, &mut component_rng(5, Stream::SeasonalShort)).unwrap();
        for noise in [SeasonalNoise::RandomWalk, SeasonalNoise::Iid] {
            let b = gen_stochastic_seasonal(505, 24, 0.0, noise, &mut component_rng(5, Stream::SeasonalShort))
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn coefficient_increments_are_centred() {
        let sigma2 = 0.05;
        let paths = coefficient_paths(1001, sigma2, SeasonalNoise::RandomWalk, &mut component_rng(9, Stream::SeasonalLong));
        let bound = 3.0 * sigma2.sqrt() / (1000f64).sqrt();
        for k in 0..HARMONICS {
            let inc: Vec<f64> = paths.windows(2).map(|w| w[1][k].0 - w[0][k].0).collect();
            let mean = inc.iter().sum::<f64>() / inc.len() as f64;
            assert!(mean.abs() < bound, "harmonic {k}: mean increment {mean}");
        }
    }

    #[test]
    fn composite_identity_and_config_echo() {
        let cfg = SimulationConfig::new(Dgp::Stochastic, Frequency::Hourly, 0.4, 0.05, 77);
        let g = simulate_series(&cfg).unwrap();
        assert_eq!(g.config, cfg);
        assert_eq!(g.composite.len(), 505);
        for t in 0..505 {
            let v = g.trend[t] + g.seasonal_short[t] + g.seasonal_long[t] + 0.4 * g.remainder[t];
            assert_eq!(v, g.composite[t]);
        }
    }

    #[test]
    fn gamma_zero_has_no_noise() {
        let cfg = SimulationConfig::new(Dgp::Deterministic, Frequency::Daily, 0.0, 0.0, 1);
        let g = simulate_series(&cfg).unwrap();
        assert_eq!(g.composite.len(), 1096);
        for t in 0..g.composite.len() {
            let r = g.composite[t] - g.trend[t] - g.seasonal_short[t] - g.seasonal_long[t];
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn validation_and_determinism() {
        let bad = SimulationConfig::new(Dgp::Deterministic, Frequency::Daily, 0.2, 0.1, 1);
        assert!(simulate_series(&bad).is_err());
        let cfg = SimulationConfig::new(Dgp::Stochastic, Frequency::Daily, 0.2, 0.025, 1);
        assert_eq!(simulate_series(&cfg).unwrap(), simulate_series(&cfg).unwrap());
    }

    #[test]
    fn sigma_does_not_change_trend_stream() {
        let a = simulate_series(&SimulationConfig::new(Dgp::Stochastic, Frequency::Hourly, 0.2, 0.025, 4)).unwrap();
        let b = simulate_series(&SimulationConfig::new(Dgp::Stochastic, Frequency::Hourly, 0.2, 0.075, 4)).unwrap();
        assert_eq!(a.trend, b.trend);
        assert_eq!(a.remainder, b.remainder);
        assert_ne!(a.seasonal_short, b.seasonal_short);
    }
}
