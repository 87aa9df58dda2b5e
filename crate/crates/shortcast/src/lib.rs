//! Early-warning forecasting of agricultural shortages from annual
//! emissions, crop-production, and forestry series.
//!
//! The pipeline, end to end:
//!
//! 1. [`ingest`] — parse long-format CSV exports, filter to one area, strip
//!    redundant records, pivot to a year-by-column table, and drop every
//!    column with gaps.
//! 2. [`stationarity`] — unit-root testing and automatic differencing, plus
//!    the exact inverse transform for mapping forecasts back.
//! 3. [`causality`] — Granger-style predictive screening of emission
//!    variables against each product.
//! 4. [`var`] — vector-autoregression fitting and iterative forecasting.
//! 5. [`shortage`] — the decision rule: flag products whose forecast falls
//!    below half their historical mean, ranked by deviation.
//! 6. [`evaluation`] — chronological train/test backtesting with MAE, MSE,
//!    and RMSE in both transformed and original units.
//!
//! [`numcore`] supplies the dense linear algebra everything else stands on,
//! and [`selftest`] hosts seeded Monte Carlo checks of the statistical
//! machinery. All persistent outputs are plain CSV or text; see the
//! command-line crate for the file-level interface.

pub mod causality;
pub mod diag;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod numcore;
pub mod selftest;
pub mod shortage;
pub mod stationarity;
pub mod var;

pub use diag::Warning;
pub use error::{Error, Result};

// Every code block in the guide chapters doubles as a doc-test, one module
// per chapter so a failure names the chapter it came from.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/stationarity.md")]
    mod stationarity {}
    #[doc = include_str!("../../../book/src/causality.md")]
    mod causality {}
    #[doc = include_str!("../../../book/src/var.md")]
    mod var {}
    #[doc = include_str!("../../../book/src/shortage.md")]
    mod shortage {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
}
