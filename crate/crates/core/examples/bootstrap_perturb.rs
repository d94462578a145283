//! Perturb a series by block-bootstrapping its remainder and score MSTL on the copies.

use mstlkit::bootstrap::{default_block_length, perturb_series, MbbConfig};
use mstlkit::evaluate::{evaluate_cases, BenchCase, ReferenceDecomposition};
use mstlkit::simulate::{simulate_series, Dgp, Frequency, SimulationConfig};
use mstlkit::{mstl_decompose, MstlParams, MultiSeasonalSeries};

fn main() -> mstlkit::Result<()> {
    let mut cfg = SimulationConfig::new(Dgp::Stochastic, Frequency::Hourly, 0.6, 0.025, 9);
    cfg.length = Some(3601);
    let values: Vec<f64> = simulate_series(&cfg)?.composite.iter().map(|v| 4500.0 + 600.0 * v).collect();

    let periods = vec![24, 168];
    let d = mstl_decompose(&MultiSeasonalSeries::new(values.clone(), periods.clone())?, &MstlParams::default())?;
    let block = default_block_length(&periods, values.len());
    let corpus = perturb_series(&values, &d, &MbbConfig::new(block, 20, 2024))?;
    println!("block length {block}, {} replicates", corpus.replicates.len());

    let cases = corpus
        .replicates
        .iter()
        .zip(&corpus.remainders)
        .enumerate()
        .map(|(r, (rep, rem))| {
            Ok(BenchCase {
                id: format!("replicate_{r:04}"),
                series: MultiSeasonalSeries::new(rep.clone(), periods.clone())?,
                truth: ReferenceDecomposition {
                    trend: d.trend.clone(),
                    seasonals: d.seasonals.clone(),
                    remainder: rem.clone(),
                },
            })
        })
        .collect::<mstlkit::Result<Vec<_>>>()?;
    let report = evaluate_cases(&cases, &MstlParams::default(), 4)?;
    let agg = report.aggregate.expect("replicates scored");
    println!(
        "RMSE trend {:.1}, daily {:.1}, weekly {:.1}, remainder {:.1}",
        agg.pooled.trend, agg.pooled.seasonal[&24], agg.pooled.seasonal[&168], agg.pooled.remainder
    );
    Ok(())
}
