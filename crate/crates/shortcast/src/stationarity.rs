//! Unit-root testing and automatic differencing.
//!
//! Annual agricultural series are rarely stationary in levels, and an
//! autoregression fitted to trending data produces spurious dynamics. This
//! module provides the augmented Dickey–Fuller test ([`adf_test`]), simple
//! differencing with recorded anchors ([`difference`]), the loop that
//! differences until the test passes or an order cap is hit
//! ([`stationarize`]), and the exact inverse transform ([`undifference`])
//! that maps forecasts made in differenced space back to original units.
//!
//! The test regression is the constant-only (no trend) variant
//!
//! ```text
//! dy_t = alpha + beta * y_{t-1} + phi_1 * dy_{t-1} + ... + phi_L * dy_{t-L} + e_t
//! ```
//!
//! with the lag depth `L` chosen by AIC and the test statistic being the
//! t-ratio of `beta`. Critical values come from an embedded response-surface
//! table for the constant-only case, evaluated at the regression's actual
//! observation count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{lstsq_fit, Matrix};

/// Default maximum augmentation lag for the unit-root test.
pub const DEFAULT_ADF_MAX_LAG: usize = 10;

/// Default cap on how many times a series is differenced.
pub const DEFAULT_MAX_DIFF_ORDER: usize = 2;

/// Response-surface constants for constant-only critical values at the
/// 1%, 5%, and 10% levels. Each row is `[b_inf, b_1, b_2, b_3]`, evaluated
/// as `b_inf + b_1/T + b_2/T^2 + b_3/T^3` at `T` regression observations.
const CV_SURFACE: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

/// Evaluates one critical-value response surface at `t_obs` observations.
fn critical_value(row: usize, t_obs: usize) -> f64 {
    let t = t_obs as f64;
    let b = CV_SURFACE[row];
    b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t)
}

/// Outcome of an augmented Dickey–Fuller test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// The t-ratio of the lagged-level coefficient. More negative means
    /// stronger evidence against a unit root.
    pub statistic: f64,
    /// Critical value at the 1% level for the realized sample size.
    pub critical_1pct: f64,
    /// Critical value at the 5% level.
    pub critical_5pct: f64,
    /// Critical value at the 10% level.
    pub critical_10pct: f64,
    /// True when `statistic < critical_5pct`, the decision the pipeline uses.
    pub is_stationary_5pct: bool,
    /// Augmentation lag depth selected by AIC.
    pub lags_used: usize,
    /// Observations in the final test regression.
    pub observations_used: usize,
}

/// Runs the augmented Dickey–Fuller test (constant, no trend) with the
/// augmentation depth chosen by AIC over `0..=max_lag`.
///
/// Lag selection compares all candidate depths on a common trimmed sample
/// (as if every candidate used `max_lag` lags), then the chosen depth is
/// refitted on the longest sample it allows. Candidates the sample cannot
/// identify (more parameters than observations) or that turn out degenerate
/// are skipped.
///
/// # Errors
///
/// * [`Error::SeriesTooShort`] when `series.len() < max_lag + 10`.
/// * [`Error::ConstantSeries`] when the series has (numerically) no
///   variation; callers treat such a column as degenerate.
/// * [`Error::RankDeficient`] when even the chosen regression is singular.
pub fn adf_test(series: &[f64], max_lag: usize) -> Result<AdfResult> {
    let n = series.len();
    let needed = max_lag + 10;
    if n < needed {
        return Err(Error::SeriesTooShort { needed, have: n });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let variance = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if variance <= 1e-12 * mean * mean + 1e-12 {
        return Err(Error::ConstantSeries);
    }

    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();

    // Candidate comparison on the common sample that the deepest candidate
    // needs, so the AIC values are comparable.
    let common_rows = diff.len() - max_lag;
    let mut best: Option<(f64, usize)> = None;
    for lag in 0..=max_lag {
        let params = lag + 2;
        if common_rows < params + 1 {
            // Not enough observations left to identify this depth.
            continue;
        }
        let (design, target) = build_regression(series, &diff, lag, max_lag);
        let fit = match lstsq_fit(&design, &target) {
            Ok(fit) => fit,
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        };
        let rows = fit.rows as f64;
        let aic = rows * (fit.rss[0] / rows).ln() + 2.0 * params as f64;
        if best.is_none_or(|(best_aic, _)| aic < best_aic) {
            best = Some((aic, lag));
        }
    }
    let (_, lags_used) = best.ok_or(Error::RankDeficient {
        column: 0,
        detail: "every candidate unit-root regression was singular".to_string(),
    })?;

    // Final fit on the longest sample the chosen depth allows.
    let (design, target) = build_regression(series, &diff, lags_used, lags_used);
    let fit = lstsq_fit(&design, &target)?;
    let observations_used = fit.rows;
    let params = lags_used + 2;
    let beta = fit.coefficients.get(1, 0);
    let dof = observations_used - params;
    let sigma2 = fit.rss[0] / dof as f64;
    let se = (sigma2 * fit.xtx_inv_diag[1]).sqrt();
    let statistic = if se > 0.0 && se.is_finite() {
        beta / se
    } else if beta < 0.0 {
        // A perfectly predictable series (zero residual variance) with a
        // negative level coefficient is mean-reverting by construction.
        f64::NEG_INFINITY
    } else if beta > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };

    let critical_1pct = critical_value(0, observations_used);
    let critical_5pct = critical_value(1, observations_used);
    let critical_10pct = critical_value(2, observations_used);
    debug_assert!(critical_1pct < critical_5pct && critical_5pct < critical_10pct);

    Ok(AdfResult {
        statistic,
        critical_1pct,
        critical_5pct,
        critical_10pct,
        is_stationary_5pct: statistic < critical_5pct,
        lags_used,
        observations_used,
    })
}

/// Builds the test regression with `lag` augmentation terms, using rows
/// `start..` of the differenced series (callers pass `start >= lag`).
///
/// Row layout: target `dy_t`; regressors `[1, y_{t-1}, dy_{t-1}, ..., dy_{t-lag}]`.
fn build_regression(series: &[f64], diff: &[f64], lag: usize, start: usize) -> (Matrix, Matrix) {
    debug_assert!(start >= lag);
    let rows = diff.len() - start;
    let cols = lag + 2;
    let mut design = Matrix::zeros(rows, cols);
    let mut target = Matrix::zeros(rows, 1);
    for (row, i) in (start..diff.len()).enumerate() {
        target.set(row, 0, diff[i]);
        design.set(row, 0, 1.0);
        design.set(row, 1, series[i]);
        for j in 1..=lag {
            design.set(row, 1 + j, diff[i - j]);
        }
    }
    (design, target)
}

/// How a series was differenced, with everything needed to undo it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffMeta {
    /// How many times the series was differenced (0 = untouched).
    pub order: usize,
    /// The leading value dropped by each differencing round, in application
    /// order; `anchors.len() == order`.
    pub anchors: Vec<f64>,
    /// False when the order cap was hit without the test passing; the
    /// pipeline proceeds but warns.
    pub achieved_stationarity: bool,
}

/// First difference of a series, returning the differences and the dropped
/// leading value (the anchor needed to reverse the transform).
///
/// # Errors
///
/// [`Error::SeriesTooShort`] when fewer than two values are given.
pub fn difference(series: &[f64]) -> Result<(Vec<f64>, f64)> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            have: series.len(),
        });
    }
    let diffs = series.windows(2).map(|w| w[1] - w[0]).collect();
    Ok((diffs, series[0]))
}

/// Differences a series until [`adf_test`] accepts stationarity at the 5%
/// level or `max_order` rounds have been applied.
///
/// A series that becomes constant after differencing is accepted as
/// trivially stationary (the test regression would be singular, but a
/// constant cannot wander). If the cap is hit without the test passing the
/// transformed series is returned anyway with
/// [`DiffMeta::achieved_stationarity`] set to `false`.
///
/// # Errors
///
/// Propagates [`adf_test`] errors; in particular a constant *input* series
/// yields [`Error::ConstantSeries`] so the caller can treat the column as
/// degenerate.
pub fn stationarize(
    series: &[f64],
    max_order: usize,
    max_lag: usize,
) -> Result<(Vec<f64>, DiffMeta)> {
    let mut current = series.to_vec();
    let mut anchors = Vec::new();
    for order in 0..=max_order {
        match adf_test(&current, max_lag) {
            Ok(result) if result.is_stationary_5pct => {
                return Ok((
                    current,
                    DiffMeta {
                        order,
                        anchors,
                        achieved_stationarity: true,
                    },
                ));
            }
            Ok(_) => {}
            Err(Error::ConstantSeries) if order > 0 => {
                return Ok((
                    current,
                    DiffMeta {
                        order,
                        anchors,
                        achieved_stationarity: true,
                    },
                ));
            }
            Err(e) => return Err(e),
        }
        if order == max_order {
            break;
        }
        let (next, anchor) = difference(&current)?;
        anchors.push(anchor);
        current = next;
    }
    Ok((
        current,
        DiffMeta {
            order: max_order,
            anchors,
            achieved_stationarity: false,
        },
    ))
}

/// Integrates a forecast made in `meta.order`-times-differenced space back
/// to original units by repeated cumulative summation.
///
/// `tail[j]` must be the last observed value of the `j`-times-differenced
/// series immediately before the forecast window — for a forecast starting
/// after training data, that is the final training value at each
/// differencing level. Differencing then undifferencing with true tails
/// reproduces the original values exactly (up to float summation error).
///
/// # Errors
///
/// [`Error::OrderMismatch`] when `tail.len() != meta.order`.
pub fn undifference(forecast: &[f64], meta: &DiffMeta, tail: &[f64]) -> Result<Vec<f64>> {
    if tail.len() != meta.order {
        return Err(Error::OrderMismatch {
            order: meta.order,
            seeds: tail.len(),
        });
    }
    let mut values = forecast.to_vec();
    for level in (0..meta.order).rev() {
        let mut acc = tail[level];
        for v in &mut values {
            acc += *v;
            *v = acc;
        }
    }
    Ok(values)
}
