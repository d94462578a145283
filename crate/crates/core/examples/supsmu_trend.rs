//! Non-seasonal series: the trend comes from the super smoother.

use mstlkit::supsmu::{supsmu_smooth, SupsmuConfig};
use mstlkit::{mstl_decompose, MstlParams, MultiSeasonalSeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> mstlkit::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 0.3).unwrap();
    let values: Vec<f64> = (0..300)
        .map(|t| (t as f64 / 50.0).sin() * 3.0 + noise.sample(&mut rng))
        .collect();

    for bass in [0.0, 5.0, 10.0] {
        let cfg = SupsmuConfig { bass, ..SupsmuConfig::default() };
        let trend = supsmu_smooth(&values, &cfg)?;
        let rough: f64 = trend.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).sum();
        println!("bass {bass:>4}: roughness {rough:.4}");
    }

    let series = MultiSeasonalSeries::new(values, vec![1])?;
    let d = mstl_decompose(&series, &MstlParams::default())?;
    println!("seasonal components: {}, notes: {:?}", d.seasonals.len(), d.notices);
    Ok(())
}
