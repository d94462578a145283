//! Score MSTL on simulated series with known components, as the `bench` command does.

use mstlkit::evaluate::{evaluate_cases, BenchCase, ReferenceDecomposition};
use mstlkit::simulate::{simulate_series, Dgp, Frequency, SimulationConfig};
use mstlkit::{MstlParams, MultiSeasonalSeries, SeasonalWindow};

fn cases(dgp: Dgp, freq: Frequency, sigma2: f64) -> mstlkit::Result<Vec<BenchCase>> {
    (0..20)
        .map(|seed| {
            let cfg = SimulationConfig::new(dgp, freq, 0.2, sigma2, seed);
            let g = simulate_series(&cfg)?;
            Ok(BenchCase {
                id: format!("{dgp:?}_{seed:02}"),
                series: MultiSeasonalSeries::new(g.composite.clone(), cfg.periods().to_vec())?,
                truth: ReferenceDecomposition::from_ground_truth(&g),
            })
        })
        .collect()
}

fn main() -> mstlkit::Result<()> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let runs = [
        ("deterministic daily, periodic", Dgp::Deterministic, Frequency::Daily, 0.0, true),
        ("stochastic hourly, default windows", Dgp::Stochastic, Frequency::Hourly, 0.025, false),
    ];
    for (label, dgp, freq, sigma2, periodic) in runs {
        let mut params = MstlParams::default();
        if periodic {
            params = params.with_s_windows([SeasonalWindow::Periodic; 2]);
        }
        let report = evaluate_cases(&cases(dgp, freq, sigma2)?, &params, threads)?;
        let agg = report.aggregate.expect("series scored");
        println!("{label}");
        println!("  trend      {:.4}", agg.pooled.trend);
        for (p, v) in &agg.pooled.seasonal {
            println!("  seasonal {p:<3} {v:.4}");
        }
        println!("  remainder  {:.4}", agg.pooled.remainder);
        println!("  {:.3} s for {} series", report.total_seconds, agg.series_count);
    }
    Ok(())
}
