mod common;

use common::dense_oracle;
use mstlkit::loess::{loess_fit_point, loess_smooth, LoessConfig, WeightedSeries};
use proptest::prelude::*;

fn case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, usize, usize, usize)> {
    (0usize..=2).prop_flat_map(|degree| {
        // Both window ends sit at distance h on a regular grid and get zero weight.
        let min_q = degree + 3;
        (Just(degree), (min_q | 1)..=12)
    })
    .prop_flat_map(|(degree, n)| {
        let min_q = degree + 3;
        let qs: Vec<usize> = (min_q..=n).filter(|q| q % 2 == 1).collect();
        (
            prop::collection::vec(0.2f64..1.5, n),
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(0.2f64..1.0, n),
            prop::sample::select(qs),
            0..n,
            Just(degree),
        )
    })
}

proptest! {
    #[test]
    fn matches_dense_oracle_irregular((gaps, y, rw, q, target, degree) in case()) {
        let x: Vec<f64> = gaps.iter().scan(0.0, |acc, g| { *acc += g; Some(*acc) }).collect();
        let series = WeightedSeries::with_positions(&x, &y).unwrap().with_weights(&rw).unwrap();
        let cfg = LoessConfig::new(q, degree, 1).unwrap();
        let got = loess_fit_point(&series, x[target], &cfg).unwrap();
        let want = dense_oracle(&x, &y, &rw, x[target], q, degree);
        prop_assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "{got} vs {want}");
    }

    #[test]
    fn matches_dense_oracle_regular((_gaps, y, rw, q, target, degree) in case()) {
        let x: Vec<f64> = (1..=y.len()).map(|i| i as f64).collect();
        let series = WeightedSeries::regular(&y).with_weights(&rw).unwrap();
        let cfg = LoessConfig::new(q, degree, 1).unwrap();
        let got = loess_fit_point(&series, x[target], &cfg).unwrap();
        let want = dense_oracle(&x, &y, &rw, x[target], q, degree);
        prop_assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "{got} vs {want}");
    }

    #[test]
    fn reproduces_polynomials(
        n in 8usize..60,
        half in 2usize..10,
        degree in 0usize..=2,
        c in prop::array::uniform3(-5.0f64..5.0),
    ) {
        let coef = [c[0], if degree >= 1 { c[1] } else { 0.0 }, if degree == 2 { c[2] * 0.01 } else { 0.0 }];
        let y: Vec<f64> = (1..=n).map(|t| { let t = t as f64; coef[0] + coef[1] * t + coef[2] * t * t }).collect();
        let cfg = LoessConfig::new(2 * half + 1, degree, 1).unwrap();
        let fit = loess_smooth(&WeightedSeries::regular(&y), &cfg).unwrap();
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (f, v) in fit.iter().zip(&y) {
            prop_assert!((f - v).abs() <= 1e-10 * scale, "{f} vs {v}");
        }
    }

    #[test]
    fn locality(
        y in prop::collection::vec(-3.0f64..3.0, 20..50),
        half in 1usize..5,
        pick in any::<prop::sample::Index>(),
        bump in 1.0f64..100.0,
    ) {
        let q = 2 * half + 1;
        let cfg = LoessConfig::new(q, 1, 1).unwrap();
        let j = pick.index(y.len());
        let mut z = y.clone();
        z[j] += bump;
        let a = loess_smooth(&WeightedSeries::regular(&y), &cfg).unwrap();
        let b = loess_smooth(&WeightedSeries::regular(&z), &cfg).unwrap();
        let n = y.len();
        for i in 0..n {
            let start = (i as isize - half as isize).clamp(0, (n - q) as isize) as usize;
            if j < start || j >= start + q {
                prop_assert_eq!(a[i], b[i]);
            }
        }
    }

    #[test]
    fn jump_one_equals_pointwise(y in prop::collection::vec(-3.0f64..3.0, 5..40), degree in 0usize..=2) {
        let cfg = LoessConfig::new(5, degree, 1).unwrap();
        let series = WeightedSeries::regular(&y);
        let fit = loess_smooth(&series, &cfg).unwrap();
        for (i, f) in fit.iter().enumerate() {
            prop_assert_eq!(*f, loess_fit_point(&series, (i + 1) as f64, &cfg).unwrap());
        }
    }
}

#[test]
fn seven_point_example_by_hand() {
    let y = [2.0, 1.0, 3.0, 5.0, 4.0, 6.0, 8.0];
    let x: Vec<f64> = (1..=7).map(f64::from).collect();
    let cfg = LoessConfig::new(5, 1, 1).unwrap();
    let got = loess_fit_point(&WeightedSeries::regular(&y), 4.0, &cfg).unwrap();
    let want = dense_oracle(&x, &y, &[1.0; 7], 4.0, 5, 1);
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn jump_interpolation_error_is_small_on_quadratic() {
    let y: Vec<f64> = (1..=200).map(|t| 0.001 * (t as f64).powi(2)).collect();
    let dense = loess_smooth(&WeightedSeries::regular(&y), &LoessConfig::new(31, 1, 1).unwrap()).unwrap();
    let jumped = loess_smooth(&WeightedSeries::regular(&y), &LoessConfig::new(31, 1, 4).unwrap()).unwrap();
    // Linear interpolation over 4 steps of a curve with second derivative 0.002.
    let bound = 0.002 * 16.0 / 8.0 + 1e-9;
    for (a, b) in dense.iter().zip(&jumped).skip(20).take(160) {
        assert!((a - b).abs() <= bound, "{a} vs {b}");
    }
}

#[test]
fn zeroing_outlier_weight_moves_fit_toward_removal() {
    let mut y: Vec<f64> = (1..=21).map(|t| (t as f64 * 0.3).sin()).collect();
    y[10] += 25.0;
    let cfg = LoessConfig::new(9, 1, 1).unwrap();
    let at = 11.0;
    let with = loess_fit_point(&WeightedSeries::regular(&y), at, &cfg).unwrap();

    let mut rw = vec![1.0; y.len()];
    rw[10] = 0.0;
    let zeroed = loess_fit_point(&WeightedSeries::regular(&y).with_weights(&rw).unwrap(), at, &cfg).unwrap();

    let x: Vec<f64> = (1..=21).map(f64::from).filter(|&t| t != 11.0).collect();
    let y_removed: Vec<f64> = y.iter().enumerate().filter(|(i, _)| *i != 10).map(|(_, v)| *v).collect();
    let removed = loess_fit_point(&WeightedSeries::with_positions(&x, &y_removed).unwrap(), at, &cfg).unwrap();

    assert!((zeroed - removed).abs() < (with - removed).abs());
}

#[test]
fn all_zero_weights_are_degenerate() {
    let y = [1.0, 2.0, 3.0, 4.0, 5.0];
    let rw = [0.0; 5];
    let s = WeightedSeries::regular(&y).with_weights(&rw).unwrap();
    assert!(loess_fit_point(&s, 3.0, &LoessConfig::new(3, 1, 1).unwrap()).is_err());
}
