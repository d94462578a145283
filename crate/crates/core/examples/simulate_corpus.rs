//! Generate every simulation setting and show that components add up.

use mstlkit::simulate::{simulate_series, Frequency, SimulationConfig};

fn main() -> mstlkit::Result<()> {
    for freq in [Frequency::Daily, Frequency::Hourly] {
        for (dgp, alpha, beta, gamma, sigma2) in SimulationConfig::study_settings() {
            let cfg = SimulationConfig { alpha, beta, ..SimulationConfig::new(dgp, freq, gamma, sigma2, 1) };
            let g = simulate_series(&cfg)?;
            let worst = (0..g.composite.len())
                .map(|t| {
                    let sum = g.trend[t] + alpha * g.seasonal_short[t] + beta * g.seasonal_long[t] + gamma * g.remainder[t];
                    (sum - g.composite[t]).abs()
                })
                .fold(0.0, f64::max);
            println!(
                "{freq:?} {dgp:?} gamma={gamma} sigma2={sigma2}: {} points, periods {:?}, identity error {worst:.1e}",
                g.composite.len(),
                cfg.periods()
            );
        }
    }
    Ok(())
}
