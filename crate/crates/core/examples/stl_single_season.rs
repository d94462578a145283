//! Single-period STL, plain and robust, on a monthly-style series with outliers.

use mstlkit::stl::{stl_decompose, SeasonalWindow, StlParams};

fn main() -> mstlkit::Result<()> {
    let period = 12;
    let mut values: Vec<f64> = (0..144)
        .map(|t| {
            let t = t as f64;
            10.0 + 0.05 * t + 2.0 * (2.0 * std::f64::consts::PI * t / 12.0).sin()
        })
        .collect();
    values[40] += 15.0;
    values[97] -= 12.0;

    for (label, params) in [
        ("periodic", StlParams::new(period, SeasonalWindow::Periodic)),
        ("window 7", StlParams::new(period, 7usize)),
        ("robust", StlParams::new(period, 7usize).robust()),
    ] {
        let fit = stl_decompose(&values, &params)?;
        println!(
            "{label:>9}: trend window {}, trend at outlier {:.3}, remainder at outlier {:.3}, weight {:.3}",
            params.resolved_trend_window(values.len()),
            fit.trend[40],
            fit.remainder[40],
            fit.robustness_weights[40]
        );
    }
    Ok(())
}
