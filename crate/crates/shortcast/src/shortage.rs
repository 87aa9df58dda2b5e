//! Shortage flagging and ranking from forecasts and history.
//!
//! A product is flagged when the forecast at the end of the horizon falls
//! strictly below half of its historical mean. Flagged products are ranked
//! by how far the forecast sits from that mean, so the report leads with
//! the sharpest projected declines.

use crate::error::{Error, Result};
use crate::ingest::SeriesTable;
use crate::var::Forecast;

/// A product is flagged when `recent_forecast < SHORTAGE_FACTOR * mean`.
pub const SHORTAGE_FACTOR: f64 = 0.5;

/// One product's shortage assessment.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortageEntry {
    /// Product column name.
    pub product: String,
    /// Forecast value at the last horizon step, in original units.
    pub recent_forecast: f64,
    /// Mean of the product's historical values.
    pub historical_mean: f64,
    /// Absolute distance between the two.
    pub deviation: f64,
    /// True when the shortage rule fired.
    pub flagged: bool,
}

/// Applies the shortage rule to one product.
///
/// # Errors
///
/// [`Error::UnknownProduct`] when the product is missing from the history
/// table or from the forecast's variables, [`Error::EmptyInput`] when its
/// history has no rows.
pub fn assess_product(
    history: &SeriesTable,
    product: &str,
    forecast: &Forecast,
) -> Result<ShortageEntry> {
    let column = history
        .column(product)
        .ok_or_else(|| Error::UnknownProduct(product.to_string()))?;
    if column.values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let historical_mean = column.values.iter().sum::<f64>() / column.values.len() as f64;
    let path = forecast
        .series(product)
        .ok_or_else(|| Error::UnknownProduct(product.to_string()))?;
    let recent_forecast = *path.last().expect("forecast horizon is at least one");
    let deviation = (recent_forecast - historical_mean).abs();
    let flagged = recent_forecast < SHORTAGE_FACTOR * historical_mean;
    Ok(ShortageEntry {
        product: product.to_string(),
        recent_forecast,
        historical_mean,
        deviation,
        flagged,
    })
}

/// Assesses every forecast product against its history and returns the
/// flagged entries, sorted by deviation (largest first, names breaking
/// ties), truncated to the top `k`.
///
/// # Errors
///
/// Propagates [`assess_product`] errors.
pub fn rank_shortages(
    forecasts: &[(String, Forecast)],
    history: &SeriesTable,
    k: usize,
) -> Result<Vec<ShortageEntry>> {
    let mut flagged = Vec::new();
    for (product, forecast) in forecasts {
        let entry = assess_product(history, product, forecast)?;
        if entry.flagged {
            flagged.push(entry);
        }
    }
    flagged.sort_by(|a, b| {
        b.deviation
            .partial_cmp(&a.deviation)
            .expect("deviations are finite")
            .then_with(|| a.product.cmp(&b.product))
    });
    flagged.truncate(k);
    Ok(flagged)
}

/// A product's observed history continued by its forecast, on one shared
/// year axis (observed years first, then one future year per horizon step).
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSeries {
    /// History years followed by the forecast years.
    pub years: Vec<i32>,
    /// Observed value per year; `None` over the forecast window.
    pub observed: Vec<Option<f64>>,
    /// Projected value per year; `None` over the history.
    pub projected: Vec<Option<f64>>,
}

/// Builds the observed-plus-projected trend for one product.
///
/// # Errors
///
/// [`Error::UnknownProduct`] when the product is missing on either side,
/// [`Error::EmptyInput`] when the history has no rows.
pub fn trend_series(
    history: &SeriesTable,
    product: &str,
    forecast: &Forecast,
) -> Result<TrendSeries> {
    let column = history
        .column(product)
        .ok_or_else(|| Error::UnknownProduct(product.to_string()))?;
    if history.years.is_empty() {
        return Err(Error::EmptyInput);
    }
    let path = forecast
        .series(product)
        .ok_or_else(|| Error::UnknownProduct(product.to_string()))?;
    let last_year = *history.years.last().expect("years are non-empty");

    let mut years = history.years.clone();
    let mut observed: Vec<Option<f64>> = column.values.iter().copied().map(Some).collect();
    let mut projected: Vec<Option<f64>> = vec![None; history.years.len()];
    for (step, &value) in path.iter().enumerate() {
        years.push(last_year + step as i32 + 1);
        observed.push(None);
        projected.push(Some(value));
    }
    Ok(TrendSeries {
        years,
        observed,
        projected,
    })
}
