//! Median remainder RMSE over a grid of seasonal windows for hourly data.

use mstlkit::evaluate::{evaluate_cases, BenchCase, ReferenceDecomposition};
use mstlkit::simulate::{simulate_series, Dgp, Frequency, SimulationConfig};
use mstlkit::{default_s_windows, MstlParams, MultiSeasonalSeries, SWindowPolicy, SeasonalWindow};

fn main() -> mstlkit::Result<()> {
    let cases = (0..20)
        .map(|seed| {
            let g = simulate_series(&SimulationConfig::new(Dgp::Stochastic, Frequency::Hourly, 0.2, 0.025, seed))?;
            Ok(BenchCase {
                id: format!("s{seed:02}"),
                series: MultiSeasonalSeries::new(g.composite.clone(), vec![24, 168])?,
                truth: ReferenceDecomposition::from_ground_truth(&g),
            })
        })
        .collect::<mstlkit::Result<Vec<_>>>()?;

    let grid = [7, 11, 15, 23, 9999];
    print!("{:>6}", "S1\\S2");
    for s2 in grid {
        print!("{s2:>8}");
    }
    println!();
    for s1 in grid {
        print!("{s1:>6}");
        for s2 in grid {
            let params = MstlParams::default().with_s_windows([SeasonalWindow::Span(s1), SeasonalWindow::Span(s2)]);
            let report = evaluate_cases(&cases, &params, 1)?;
            let mut rem: Vec<f64> = report.series.iter().map(|s| s.remainder_rmse).collect();
            rem.sort_by(f64::total_cmp);
            print!("{:>8.4}", (rem[9] + rem[10]) / 2.0);
        }
        println!();
    }
    println!("default windows: {:?}", default_s_windows(2, SWindowPolicy::default()));
    Ok(())
}
