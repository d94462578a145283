//! Decompose an hourly series with daily and weekly seasonality.
//!
//! Pass a CSV path to decompose your own data:
//! `cargo run --example decompose_series -- demand.csv`

use mstlkit::files::read_series_file;
use mstlkit::simulate::{simulate_series, Dgp, Frequency, SimulationConfig};
use mstlkit::{mstl_decompose, seasonal_adjust, MstlParams, MultiSeasonalSeries};

fn main() -> mstlkit::Result<()> {
    let values = match std::env::args().nth(1) {
        Some(path) => read_series_file(path.as_ref(), None)?.values,
        None => {
            let cfg = SimulationConfig::new(Dgp::Stochastic, Frequency::Hourly, 0.4, 0.025, 42);
            simulate_series(&cfg)?.composite
        }
    };

    let series = MultiSeasonalSeries::new(values, vec![24, 168])?;
    let d = mstl_decompose(&series, &MstlParams::default())?;

    println!("periods {:?}, windows {:?}", d.retained_periods, d.s_windows);
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "t", "data", "trend", "daily", "weekly", "remainder");
    for t in (0..d.len()).step_by(d.len() / 12) {
        println!(
            "{:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            t + 1,
            d.data[t],
            d.trend[t],
            d.seasonals[&24][t],
            d.seasonals[&168][t],
            d.remainder[t]
        );
    }

    let adjusted = seasonal_adjust(&d);
    let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    println!("range before adjustment {:.3}, after {:.3}", spread(&d.data), spread(&adjusted));
    Ok(())
}
