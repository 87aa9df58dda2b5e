//! Backtesting: hold out the most recent years, refit on the rest, and
//! score the forecasts against what actually happened.
//!
//! Errors are reported in two spaces. *Original units* is what a reader
//! cares about; *transformed space* (differenced and standardized with the
//! training-set parameters) is what the model was actually fitted on, and
//! separates model error from the amplification that undifferencing applies
//! to it.

use crate::diag::Warning;
use crate::error::{Error, Result};
use crate::ingest::{Column, SeriesTable};
use crate::stationarity::DiffMeta;
use crate::var::{fit_product, forecast, PipelineOptions, ProductFit};

/// Default last training year: rows up to and including it train the model,
/// later rows are held out.
pub const DEFAULT_TRAIN_END_YEAR: i32 = 2010;

/// Splits a table by year: rows at or before `train_end_year` train, the
/// rest test.
///
/// # Errors
///
/// [`Error::DegenerateSplit`] when either side ends up empty.
pub fn split(table: &SeriesTable, train_end_year: i32) -> Result<(SeriesTable, SeriesTable)> {
    let cut = table
        .years
        .iter()
        .position(|&y| y > train_end_year)
        .unwrap_or(table.years.len());
    let train_rows = cut;
    let test_rows = table.years.len() - cut;
    if train_rows == 0 || test_rows == 0 {
        return Err(Error::DegenerateSplit {
            train_rows,
            test_rows,
        });
    }
    let take = |range: std::ops::Range<usize>| SeriesTable {
        years: table.years[range.clone()].to_vec(),
        columns: table
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                kind: c.kind,
                values: c.values[range.clone()].to_vec(),
            })
            .collect(),
    };
    Ok((take(0..cut), take(cut..table.years.len())))
}

/// Mean absolute error.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let total: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).abs())
        .sum();
    Ok(total / actual.len() as f64)
}

/// Mean squared error.
pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let total: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok(total / actual.len() as f64)
}

/// Root mean squared error.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    Ok(mse(actual, predicted)?.sqrt())
}

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Which representation a metric row was computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSpace {
    /// Differenced and standardized with the training-set parameters.
    Transformed,
    /// The units of the input data.
    Original,
}

impl MetricSpace {
    /// Stable lowercase label for reports.
    pub fn as_str(self) -> &'static str {
        match self {
            MetricSpace::Transformed => "transformed",
            MetricSpace::Original => "original",
        }
    }
}

/// One row of backtest metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMetrics {
    /// Product the row scores.
    pub product: String,
    /// Representation the errors were computed in.
    pub space: MetricSpace,
    /// Mean absolute error.
    pub mae: f64,
    /// Mean squared error.
    pub mse: f64,
    /// Root mean squared error.
    pub rmse: f64,
}

/// Actual values over the full timeline with predictions over the held-out
/// years, for plotting forecasts against reality.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTrend {
    /// Every year of the table, train and test.
    pub years: Vec<i32>,
    /// Observed product values over those years.
    pub actual: Vec<f64>,
    /// Model predictions; `None` over the training years.
    pub predicted: Vec<Option<f64>>,
}

/// Everything the backtest of one product produces.
#[derive(Debug, Clone)]
pub struct BacktestReport {
    /// Product that was backtested.
    pub product: String,
    /// The fit on the training window (model, scan results, drops).
    pub fit: ProductFit,
    /// Metric rows: transformed space first, then original units.
    pub metrics: Vec<EvalMetrics>,
    /// Timeline of actuals and test-window predictions.
    pub trend: EvalTrend,
    /// Rows in the training window.
    pub train_rows: usize,
    /// Rows in the held-out window.
    pub test_rows: usize,
}

/// Maps held-out values of one series into the model's fitting space: apply
/// the training-set differencing to the concatenated train-plus-test series,
/// keep the last `test.len()` values (so the first held-out difference
/// reaches back to the last training value), then standardize with the
/// training parameters.
fn transformed_actuals(
    train: &[f64],
    test: &[f64],
    meta: &DiffMeta,
    standardization: (f64, f64),
) -> Vec<f64> {
    let mut combined: Vec<f64> = train.iter().chain(test).copied().collect();
    for _ in 0..meta.order {
        combined = combined.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let (mean, std) = standardization;
    combined[combined.len() - test.len()..]
        .iter()
        .map(|&v| (v - mean) / std)
        .collect()
}

/// Backtests one product: split by `train_end_year`, run the full pipeline
/// on the training window, forecast across the held-out window, and score
/// in both spaces.
///
/// # Errors
///
/// [`Error::UnknownProduct`] for a missing product, [`Error::DegenerateSplit`]
/// when the cut leaves either window empty, plus anything the training-window
/// pipeline raises.
pub fn backtest(
    full: &SeriesTable,
    product: &str,
    train_end_year: i32,
    opts: &PipelineOptions,
    warnings: &mut Vec<Warning>,
) -> Result<BacktestReport> {
    let full_column = full
        .column(product)
        .ok_or_else(|| Error::UnknownProduct(product.to_string()))?
        .clone();
    let (train, test) = split(full, train_end_year)?;
    let fit = fit_product(&train, product, opts, warnings)?;

    let horizon = test.n_rows();
    let fc = forecast(&fit.model, horizon);
    let predicted: Vec<f64> = fc
        .series(product)
        .expect("the pipeline always models the product itself");
    let actual: Vec<f64> = test
        .column(product)
        .expect("split preserves columns")
        .values
        .clone();

    let var_idx = fit
        .model
        .variables
        .iter()
        .position(|v| v == product)
        .expect("the pipeline always models the product itself");
    let predicted_transformed: Vec<f64> = fc
        .values_transformed
        .iter()
        .map(|row| row[var_idx])
        .collect();
    let actual_transformed = transformed_actuals(
        &train.column(product).expect("split preserves columns").values,
        &actual,
        &fit.model.diff_meta[var_idx],
        fit.model.standardization[var_idx],
    );

    let row = |space: MetricSpace, actual: &[f64], predicted: &[f64]| -> Result<EvalMetrics> {
        Ok(EvalMetrics {
            product: product.to_string(),
            space,
            mae: mae(actual, predicted)?,
            mse: mse(actual, predicted)?,
            rmse: rmse(actual, predicted)?,
        })
    };
    let metrics = vec![
        row(
            MetricSpace::Transformed,
            &actual_transformed,
            &predicted_transformed,
        )?,
        row(MetricSpace::Original, &actual, &predicted)?,
    ];

    let mut predicted_timeline: Vec<Option<f64>> = vec![None; train.n_rows()];
    predicted_timeline.extend(predicted.iter().copied().map(Some));
    let trend = EvalTrend {
        years: full.years.clone(),
        actual: full_column.values,
        predicted: predicted_timeline,
    };

    Ok(BacktestReport {
        product: product.to_string(),
        fit,
        metrics,
        trend,
        train_rows: train.n_rows(),
        test_rows: horizon,
    })
}

/// Outcome of backtesting one product in a batch run.
#[derive(Debug)]
pub struct BacktestOutcome {
    /// The product column name.
    pub product: String,
    /// The report, or the error that stopped it.
    pub result: Result<BacktestReport>,
}

/// Batch report from [`backtest_all`].
#[derive(Debug)]
pub struct BacktestAllReport {
    /// One outcome per product column, in table order.
    pub outcomes: Vec<BacktestOutcome>,
    /// Warnings from every product's pipeline.
    pub warnings: Vec<Warning>,
    /// Rows in the training window.
    pub train_rows: usize,
    /// Rows in the held-out window.
    pub test_rows: usize,
}

/// Backtests every product column, capturing per-product failures. A cut
/// year that empties either window is fatal for the whole batch.
///
/// # Errors
///
/// [`Error::DegenerateSplit`] when the split itself is unusable.
pub fn backtest_all(
    full: &SeriesTable,
    train_end_year: i32,
    opts: &PipelineOptions,
) -> Result<BacktestAllReport> {
    let (train, test) = split(full, train_end_year)?;
    let (train_rows, test_rows) = (train.n_rows(), test.n_rows());

    let products: Vec<String> = full.product_columns().map(|c| c.name.clone()).collect();
    let mut warnings = Vec::new();
    let mut outcomes = Vec::with_capacity(products.len());
    for product in products {
        let result = backtest(full, &product, train_end_year, opts, &mut warnings);
        if let Err(e) = &result {
            warnings.push(Warning::new(
                "evaluation",
                product.clone(),
                format!("product skipped: {e}"),
                "see the error; the remaining products are unaffected",
            ));
        }
        outcomes.push(BacktestOutcome { product, result });
    }
    Ok(BacktestAllReport {
        outcomes,
        warnings,
        train_rows,
        test_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ColumnKind;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn table_from(start_year: i32, columns: Vec<(&str, ColumnKind, Vec<f64>)>) -> SeriesTable {
        let n = columns[0].2.len();
        SeriesTable {
            years: (0..n as i32).map(|i| start_year + i).collect(),
            columns: columns
                .into_iter()
                .map(|(name, kind, values)| Column {
                    name: name.to_string(),
                    kind,
                    values,
                })
                .collect(),
        }
    }

    #[test]
    fn split_puts_the_cut_year_in_training() {
        let table = table_from(
            2008,
            vec![("p", ColumnKind::Production, vec![1.0, 2.0, 3.0, 4.0, 5.0])],
        );
        let (train, test) = split(&table, 2010).unwrap();
        assert_eq!(train.years, vec![2008, 2009, 2010]);
        assert_eq!(test.years, vec![2011, 2012]);
        assert_eq!(train.columns[0].values, vec![1.0, 2.0, 3.0]);
        assert_eq!(test.columns[0].values, vec![4.0, 5.0]);
    }

    #[test]
    fn split_rejects_empty_windows() {
        let table = table_from(2008, vec![("p", ColumnKind::Production, vec![1.0, 2.0])]);
        assert!(matches!(
            split(&table, 2007),
            Err(Error::DegenerateSplit {
                train_rows: 0,
                test_rows: 2
            })
        ));
        assert!(matches!(
            split(&table, 2009),
            Err(Error::DegenerateSplit {
                train_rows: 2,
                test_rows: 0
            })
        ));
    }

    #[test]
    fn error_metrics_match_hand_computation() {
        let actual = [1.0, 2.0, 3.0];
        let predicted = [2.0, 2.0, 1.0];
        assert_abs_diff_eq!(mae(&actual, &predicted).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mse(&actual, &predicted).unwrap(), 5.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            rmse(&actual, &predicted).unwrap(),
            (5.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
        assert!(matches!(
            mae(&actual, &predicted[..2]),
            Err(Error::LengthMismatch { left: 3, right: 2 })
        ));
        assert!(matches!(mae(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn transformed_actuals_reach_back_into_training() {
        // Differencing the concatenation means the first held-out difference
        // is test[0] - train[last].
        let train = [10.0, 12.0, 9.0];
        let test = [14.0, 20.0, 11.0];
        let meta = DiffMeta {
            order: 1,
            anchors: vec![10.0],
            achieved_stationarity: true,
        };
        let got = transformed_actuals(&train, &test, &meta, (1.0, 2.0));
        // Differences over the tail: [14-9, 20-14, 11-20] = [5, 6, -9],
        // then z-scored with mean 1, std 2.
        assert_eq!(got, vec![2.0, 2.5, -5.0]);
    }

    #[test]
    fn backtest_of_a_linear_ramp_is_error_free() {
        // 50 training rows and 9 held-out rows of an exact ramp: the
        // deterministic continuation must nail every held-out value.
        let n = 59usize;
        let product: Vec<f64> = (0..n).map(|i| 500.0 - 3.0 * i as f64).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let emission: Vec<f64> = (0..n)
            .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
            .collect();
        let table = table_from(
            1961,
            vec![
                ("N2O | Direct", ColumnKind::Emission, emission),
                ("Barley | Yield", ColumnKind::Production, product),
            ],
        );
        let mut warnings = Vec::new();
        let report = backtest(
            &table,
            "Barley | Yield",
            2010,
            &PipelineOptions::default(),
            &mut warnings,
        )
        .unwrap();
        assert_eq!(report.train_rows, 50);
        assert_eq!(report.test_rows, 9);
        for row in &report.metrics {
            assert_abs_diff_eq!(row.mae, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(row.rmse, 0.0, epsilon = 1e-9);
        }
        // The trend covers the full timeline with predictions only at the end.
        assert_eq!(report.trend.years.len(), n);
        assert_eq!(report.trend.predicted.iter().filter(|p| p.is_some()).count(), 9);
        assert!(report.trend.predicted[..50].iter().all(|p| p.is_none()));
    }

    #[test]
    fn backtest_metrics_are_internally_consistent() {
        // Stochastic but stationary data: errors are nonzero, rmse^2 == mse,
        // and mae never exceeds rmse.
        let n = 70usize;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let mut draw =
            move || <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        let emission: Vec<f64> = (0..n).map(|_| draw()).collect();
        let product: Vec<f64> = (0..n).map(|_| 40.0 + 2.0 * draw()).collect();
        let table = table_from(
            1950,
            vec![
                ("CH4 | Direct", ColumnKind::Emission, emission),
                ("Oats | Yield", ColumnKind::Production, product),
            ],
        );
        let mut warnings = Vec::new();
        let report = backtest(
            &table,
            "Oats | Yield",
            2010,
            &PipelineOptions::default(),
            &mut warnings,
        )
        .unwrap();
        assert_eq!(report.metrics.len(), 2);
        assert_eq!(report.metrics[0].space, MetricSpace::Transformed);
        assert_eq!(report.metrics[1].space, MetricSpace::Original);
        for row in &report.metrics {
            assert!(row.mae > 0.0);
            assert_abs_diff_eq!(row.rmse * row.rmse, row.mse, epsilon = 1e-10);
            assert!(row.mae <= row.rmse + 1e-12);
        }
    }

    #[test]
    fn backtest_all_reports_the_split_shape_once() {
        let n = 60usize;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut draw =
            move || <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        let table = table_from(
            1961,
            vec![
                ("CH4 | Direct", ColumnKind::Emission, (0..n).map(|_| draw()).collect()),
                (
                    "Rye | Yield",
                    ColumnKind::Production,
                    (0..n).map(|_| 10.0 + draw()).collect(),
                ),
            ],
        );
        let report = backtest_all(&table, 2010, &PipelineOptions::default()).unwrap();
        assert_eq!(report.train_rows, 50);
        assert_eq!(report.test_rows, 10);
        assert_eq!(report.outcomes.len(), 1);
        assert!(report.outcomes[0].result.is_ok());

        assert!(matches!(
            backtest_all(&table, 1940, &PipelineOptions::default()),
            Err(Error::DegenerateSplit { .. })
        ));
    }
}
