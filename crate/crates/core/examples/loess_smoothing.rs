//! Local regression on regular and irregular positions.

use mstlkit::loess::{loess_fit_point, loess_smooth, LoessConfig, WeightedSeries};

fn main() -> mstlkit::Result<()> {
    let y: Vec<f64> = (0..40).map(|t| (t as f64 / 6.0).sin() + if t % 7 == 0 { 0.8 } else { 0.0 }).collect();
    for degree in 0..=2 {
        let cfg = LoessConfig::new(9, degree, 1)?;
        let fit = loess_smooth(&WeightedSeries::regular(&y), &cfg)?;
        println!("degree {degree}: {:?}", fit.iter().take(6).map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    }

    let x = [0.0, 0.4, 1.1, 1.5, 2.6, 3.0, 3.2, 4.9];
    let v = [1.0, 1.3, 2.2, 2.4, 3.9, 4.1, 4.0, 6.2];
    let series = WeightedSeries::with_positions(&x, &v)?;
    let cfg = LoessConfig::new(5, 1, 1)?;
    for at in [0.5, 2.0, 4.0] {
        println!("fit at {at}: {:.4}", loess_fit_point(&series, at, &cfg)?);
    }
    Ok(())
}
