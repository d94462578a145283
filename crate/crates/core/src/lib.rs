//! Seasonal-trend decomposition of time series with several seasonal cycles.
//!
//! The crate provides:
//!
//! - [`mstl`]: multiple-seasonal decomposition driven by repeated STL fits,
//!   with a super-smoother trend for non-seasonal series;
//! - [`stl`] and [`loess`]: the single-period decomposition and its smoother;
//! - [`supsmu`]: Friedman's variable-span super smoother;
//! - [`preprocess`]: missing-value imputation and Box-Cox transforms;
//! - [`simulate`], [`bootstrap`], [`evaluate`]: synthetic and perturbed
//!   corpora with known components, and RMSE scoring against them;
//! - [`files`] and [`cli`]: the on-disk formats and the `mstlkit` command.
//!
//! ```
//! use mstlkit::{mstl_decompose, MstlParams, MultiSeasonalSeries};
//!
//! let values: Vec<f64> = (0..200)
//!     .map(|t| {
//!         let t = t as f64;
//!         0.01 * t + (t * std::f64::consts::TAU / 12.0).sin() + 0.5 * (t * std::f64::consts::TAU / 30.0).cos()
//!     })
//!     .collect();
//! let series = MultiSeasonalSeries::new(values, vec![12, 30]).unwrap();
//! let d = mstl_decompose(&series, &MstlParams::default()).unwrap();
//! assert_eq!(d.seasonals.len(), 2);
//! ```

pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod evaluate;
pub mod files;
pub mod loess;
pub mod mstl;
pub mod preprocess;
pub mod simulate;
pub mod stl;
pub mod supsmu;

pub use error::{Error, Result};
pub use mstl::{
    default_s_windows, mstl_decompose, retain_periods, seasonal_adjust, Decomposition, MstlParams,
    MultiSeasonalSeries, SWindowPolicy, StlOverrides,
};
pub use stl::{stl_decompose, SeasonalWindow, StlFit, StlParams};
