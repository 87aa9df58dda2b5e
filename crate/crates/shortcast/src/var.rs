//! Vector autoregression: fitting, forecasting, and the per-product pipeline.
//!
//! The model is the classic VAR(p),
//!
//! ```text
//! y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t
//! ```
//!
//! estimated equation-by-equation with ordinary least squares on one stacked
//! design matrix (`[1, y_{t-1}, ..., y_{t-p}]` per row), which for a VAR is
//! exactly the maximum-likelihood point estimate. Forecasts iterate the
//! fitted recursion with the noise term at zero.
//!
//! [`fit`] works on a table that is already stationary and standardized.
//! [`fit_product`] is the full per-product pipeline: select the product's
//! modelling view, difference every column until stationary, optionally
//! screen predictors, standardize, fit with automatic lag fallback, and
//! remember every transform so [`forecast`] can map results back to
//! original units. [`fit_all_products`] runs that for every product column
//! and captures per-product failures instead of aborting the batch.

use serde::{Deserialize, Serialize};

use crate::causality::{causality_gate, granger_matrix, GrangerMatrix};
use crate::diag::Warning;
use crate::error::{Error, Result};
use crate::ingest::{assemble_model_table, SeriesTable};
use crate::numcore::{
    companion_spectral_radius, lstsq_fit, mean_and_std, Matrix, SpectralRadius, Vector,
};
use crate::stationarity::{difference, stationarize, undifference, DiffMeta};

/// Default autoregression order.
pub const DEFAULT_VAR_LAG: usize = 6;

/// Magnitude cap applied to each forecast step in transformed space, so an
/// unstable recursion saturates instead of overflowing.
pub const FORECAST_CLAMP: f64 = 1e15;

/// Schema tag written into (and required from) serialized model dumps.
pub const MODEL_SCHEMA: &str = "varmodel-v1";

/// A fitted vector autoregression together with every transform needed to
/// turn its model-space forecasts back into original units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarModel {
    /// Variable names, in equation order (the forecast target is last when
    /// the model came from the per-product pipeline).
    pub variables: Vec<String>,
    /// Autoregression order `p`.
    pub lag: usize,
    /// Intercept vector `c`, one entry per variable.
    pub intercept: Vector,
    /// Coefficient matrices `A_1..A_p`; entry `(r, c)` of `A_l` weights
    /// variable `c` at lag `l` in the equation for variable `r`.
    pub coefficients: Vec<Matrix>,
    /// Residual covariance estimate, divisor `rows_used - (k*p + 1)`.
    pub residual_sigma: Matrix,
    /// Differencing applied to each variable before fitting.
    pub diff_meta: Vec<DiffMeta>,
    /// Per-variable `(mean, std)` of the differenced series; fitting happens
    /// on `(value - mean) / std`.
    pub standardization: Vec<(f64, f64)>,
    /// Per-variable integration seeds: `undiff_seeds[v][j]` is the last
    /// training value of the `j`-times-differenced original series.
    pub undiff_seeds: Vec<Vec<f64>>,
    /// Last `p` rows of the transformed training data, oldest first; the
    /// forecast recursion starts from these.
    pub last_transformed: Vec<Vec<f64>>,
    /// Spectral radius of the companion matrix (stability diagnostic).
    pub spectral: SpectralRadius,
    /// Number of regression rows the fit used.
    pub rows_used: usize,
}

/// Versioned on-disk wrapper for [`VarModel`].
#[derive(Serialize, Deserialize)]
struct ModelDump {
    schema: String,
    model: VarModel,
}

impl VarModel {
    /// Number of variables.
    pub fn k(&self) -> usize {
        self.variables.len()
    }

    /// Serializes the model as versioned JSON (schema [`MODEL_SCHEMA`]).
    pub fn to_json(&self) -> Result<String> {
        let dump = ModelDump {
            schema: MODEL_SCHEMA.to_string(),
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&dump)?)
    }

    /// Restores a model serialized by [`VarModel::to_json`].
    ///
    /// # Errors
    ///
    /// [`Error::SchemaMismatch`] when the dump carries a different schema
    /// tag, [`Error::Json`] when it is not valid JSON of the right shape.
    pub fn from_json(text: &str) -> Result<VarModel> {
        let dump: ModelDump = serde_json::from_str(text)?;
        if dump.schema != MODEL_SCHEMA {
            return Err(Error::SchemaMismatch {
                expected: MODEL_SCHEMA.to_string(),
                found: dump.schema,
            });
        }
        Ok(dump.model)
    }

    /// Writes the JSON dump to a file.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Reads a JSON dump from a file.
    pub fn load(path: &std::path::Path) -> Result<VarModel> {
        let text = std::fs::read_to_string(path)?;
        VarModel::from_json(&text)
    }
}

/// Iterated forecast from a fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    /// Variable names, matching the model.
    pub variables: Vec<String>,
    /// Number of steps ahead.
    pub horizon: usize,
    /// `values[step][variable]` in original units.
    pub values: Vec<Vec<f64>>,
    /// `values_transformed[step][variable]` in model (differenced,
    /// standardized) space.
    pub values_transformed: Vec<Vec<f64>>,
    /// True when the recursion hit the [`FORECAST_CLAMP`] guard.
    pub clamped: bool,
}

impl Forecast {
    /// Index of a variable by name.
    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// The original-units forecast path of one variable.
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.variable_index(name)?;
        Some(self.values.iter().map(|row| row[idx]).collect())
    }
}

/// Fits a VAR(p) to a table whose columns are already stationary and
/// standardized (the identity transforms are recorded, so forecasts come
/// back in the table's own units).
///
/// # Errors
///
/// * [`Error::InsufficientData`] unless `rows - p >= k*p + 2`, i.e. at least
///   one residual degree of freedom per equation.
/// * [`Error::RankDeficient`] from the underlying solver, with the offending
///   regressor named.
pub fn fit(table: &SeriesTable, p: usize) -> Result<VarModel> {
    let k = table.n_cols();
    let t = table.n_rows();
    let mut data = Matrix::zeros(t, k);
    for (j, col) in table.columns.iter().enumerate() {
        for (i, &v) in col.values.iter().enumerate() {
            data.set(i, j, v);
        }
    }
    let variables: Vec<String> = table.columns.iter().map(|c| c.name.clone()).collect();
    let core = fit_transformed(&data, p, &variables)?;
    Ok(assemble_model(
        variables.clone(),
        core,
        vec![
            DiffMeta {
                order: 0,
                anchors: Vec::new(),
                achieved_stationarity: true,
            };
            k
        ],
        vec![(0.0, 1.0); k],
        vec![Vec::new(); k],
    ))
}

/// The parts of a model that come straight out of the regression.
struct FittedCore {
    lag: usize,
    intercept: Vector,
    coefficients: Vec<Matrix>,
    residual_sigma: Matrix,
    last_transformed: Vec<Vec<f64>>,
    spectral: SpectralRadius,
    rows_used: usize,
}

fn assemble_model(
    variables: Vec<String>,
    core: FittedCore,
    diff_meta: Vec<DiffMeta>,
    standardization: Vec<(f64, f64)>,
    undiff_seeds: Vec<Vec<f64>>,
) -> VarModel {
    VarModel {
        variables,
        lag: core.lag,
        intercept: core.intercept,
        coefficients: core.coefficients,
        residual_sigma: core.residual_sigma,
        diff_meta,
        standardization,
        undiff_seeds,
        last_transformed: core.last_transformed,
        spectral: core.spectral,
        rows_used: core.rows_used,
    }
}

/// Least-squares fit of the stacked VAR regression on a `T x k` data matrix.
fn fit_transformed(data: &Matrix, p: usize, variables: &[String]) -> Result<FittedCore> {
    assert!(p >= 1, "autoregression order must be at least one");
    let t = data.rows();
    let k = data.cols();
    let params = k * p + 1;
    // T - p regression rows must cover the parameters plus one residual
    // degree of freedom.
    let needed = params + p + 1;
    if t < needed {
        return Err(Error::InsufficientData { needed, have: t });
    }

    let rows = t - p;
    let mut design = Matrix::zeros(rows, params);
    let mut targets = Matrix::zeros(rows, k);
    for (row, ti) in (p..t).enumerate() {
        design.set(row, 0, 1.0);
        for lag in 1..=p {
            for var in 0..k {
                design.set(row, 1 + (lag - 1) * k + var, data.get(ti - lag, var));
            }
        }
        for var in 0..k {
            targets.set(row, var, data.get(ti, var));
        }
    }

    let fit = lstsq_fit(&design, &targets).map_err(|e| match e {
        Error::RankDeficient { column, .. } => Error::RankDeficient {
            column,
            detail: regressor_name(column, variables, k),
        },
        other => other,
    })?;
    let b = fit.coefficients;

    let intercept = Vector::from_vec((0..k).map(|var| b.get(0, var)).collect());
    let mut coefficients = Vec::with_capacity(p);
    for lag in 1..=p {
        let mut a = Matrix::zeros(k, k);
        for eq in 0..k {
            for var in 0..k {
                a.set(eq, var, b.get(1 + (lag - 1) * k + var, eq));
            }
        }
        coefficients.push(a);
    }

    // Residual covariance with the regression-degrees-of-freedom divisor.
    let predicted = design.matmul(&b);
    let dof = rows - params;
    let mut residual_sigma = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            for row in 0..rows {
                let ei = targets.get(row, i) - predicted.get(row, i);
                let ej = targets.get(row, j) - predicted.get(row, j);
                acc += ei * ej;
            }
            residual_sigma.set(i, j, acc / dof as f64);
        }
    }

    let spectral = companion_spectral_radius(&coefficients);
    let last_transformed: Vec<Vec<f64>> = (t - p..t)
        .map(|row| (0..k).map(|var| data.get(row, var)).collect())
        .collect();

    Ok(FittedCore {
        lag: p,
        intercept,
        coefficients,
        residual_sigma,
        last_transformed,
        spectral,
        rows_used: rows,
    })
}

/// Names the design column `idx` of the stacked regression for error
/// messages: the intercept, or "variable @ lag l".
fn regressor_name(idx: usize, variables: &[String], k: usize) -> String {
    if idx == 0 {
        "intercept column".to_string()
    } else {
        let lag = (idx - 1) / k + 1;
        let var = (idx - 1) % k;
        format!("regressor `{}` @ lag {lag}", variables[var])
    }
}

/// Iterates the fitted recursion `h` steps with the noise term at zero and
/// maps each step back through destandardization and undifferencing.
///
/// Transformed-space values are clamped to [`FORECAST_CLAMP`]; with an
/// unstable model (spectral radius at or above one) the path saturates
/// rather than overflowing, and [`Forecast::clamped`] reports that it
/// happened.
///
/// # Panics
///
/// Panics if `h` is zero.
pub fn forecast(model: &VarModel, h: usize) -> Forecast {
    assert!(h >= 1, "forecast horizon must be at least one step");
    let k = model.k();
    let p = model.lag;
    debug_assert_eq!(model.last_transformed.len(), p);

    let mut window: Vec<Vec<f64>> = model.last_transformed.clone();
    let mut transformed: Vec<Vec<f64>> = Vec::with_capacity(h);
    let mut clamped = false;
    for _ in 0..h {
        let mut next: Vec<f64> = model.intercept.as_slice().to_vec();
        for lag in 1..=p {
            let past = &window[window.len() - lag];
            let a = &model.coefficients[lag - 1];
            for (eq, entry) in next.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (var, value) in past.iter().enumerate() {
                    acc += a.get(eq, var) * value;
                }
                *entry += acc;
            }
        }
        for v in &mut next {
            if v.is_nan() {
                *v = 0.0;
                clamped = true;
            } else if v.abs() > FORECAST_CLAMP {
                *v = v.signum() * FORECAST_CLAMP;
                clamped = true;
            }
        }
        window.remove(0);
        window.push(next.clone());
        transformed.push(next);
    }

    // Map back to original units, one variable at a time: undo the z-score,
    // then integrate the differences from the stored seeds.
    let mut original_cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    for var in 0..k {
        let (mean, std) = model.standardization[var];
        let destandardized: Vec<f64> = transformed.iter().map(|row| row[var] * std + mean).collect();
        let restored = undifference(
            &destandardized,
            &model.diff_meta[var],
            &model.undiff_seeds[var],
        )
        .expect("seed count matches differencing order by construction");
        original_cols.push(restored);
    }
    let values: Vec<Vec<f64>> = (0..h)
        .map(|step| (0..k).map(|var| original_cols[var][step]).collect())
        .collect();

    Forecast {
        variables: model.variables.clone(),
        horizon: h,
        values,
        values_transformed: transformed,
        clamped,
    }
}

/// Knobs for the per-product pipeline. `Default` gives the standard run:
/// lag 6 with fallback, differencing up to order 2, unit-root lag cap 10,
/// predictive scan up to lag 6 in report-only mode at threshold 0.05.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Requested autoregression order (reduced automatically if the sample
    /// cannot identify it).
    pub lag: usize,
    /// Differencing order cap.
    pub max_diff_order: usize,
    /// Unit-root test lag cap.
    pub adf_max_lag: usize,
    /// Predictive-scan lag cap.
    pub granger_max_lag: usize,
    /// When true, emissions that fail the predictive gate are excluded from
    /// the model; when false the scan is report-only.
    pub granger_filter: bool,
    /// Gate p-value threshold.
    pub gate_threshold: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            lag: DEFAULT_VAR_LAG,
            max_diff_order: crate::stationarity::DEFAULT_MAX_DIFF_ORDER,
            adf_max_lag: crate::stationarity::DEFAULT_ADF_MAX_LAG,
            granger_max_lag: crate::causality::DEFAULT_GRANGER_MAX_LAG,
            granger_filter: false,
            gate_threshold: crate::causality::DEFAULT_GATE_THRESHOLD,
        }
    }
}

/// A fitted per-product model plus the pipeline's bookkeeping about how it
/// was obtained.
#[derive(Debug, Clone)]
pub struct ProductFit {
    /// The product column this model forecasts.
    pub product: String,
    /// The fitted model; its variables are the surviving emissions followed
    /// by the product.
    pub model: VarModel,
    /// Predictive-scan result, when the sample allowed the scan.
    pub granger: Option<GrangerMatrix>,
    /// Emissions that cleared the predictive gate (always computed when the
    /// scan ran, even in report-only mode).
    pub gated_predictors: Option<Vec<String>>,
    /// Emission columns the pipeline dropped (constant, too short, or gated
    /// out), in table order.
    pub dropped_columns: Vec<String>,
    /// True when the product series was deterministic after differencing and
    /// the "model" just continues its pattern.
    pub degenerate: bool,
}

/// One column's state after the stationarity stage.
struct PreparedColumn {
    name: String,
    original: Vec<f64>,
    transformed: Vec<f64>,
    meta: DiffMeta,
}

/// Runs the full pipeline for one product: assemble its view, stationarize
/// every column, optionally screen predictors, standardize, and fit with
/// automatic lag fallback. Non-fatal degradations (dropped emission columns,
/// reduced lag, skipped scan) are appended to `warnings`.
///
/// # Errors
///
/// * [`Error::UnknownProduct`] when `product` is not a product column.
/// * [`Error::SeriesTooShort`] when even the product series is too short to
///   test for stationarity.
/// * [`Error::InsufficientData`] when no lag order down to one is
///   identifiable from the sample.
/// * [`Error::RankDeficient`] when the final regression is singular.
pub fn fit_product(
    full: &SeriesTable,
    product: &str,
    opts: &PipelineOptions,
    warnings: &mut Vec<Warning>,
) -> Result<ProductFit> {
    let view = assemble_model_table(full, product)?;
    let mut dropped_columns = Vec::new();
    let mut prepared: Vec<PreparedColumn> = Vec::new();
    let mut degenerate_product: Option<PreparedColumn> = None;

    for col in &view.columns {
        let is_product = col.name == product;
        match stationarize(&col.values, opts.max_diff_order, opts.adf_max_lag) {
            Ok((transformed, meta)) => {
                if !meta.achieved_stationarity {
                    warnings.push(Warning::new(
                        "stationarity",
                        col.name.clone(),
                        format!(
                            "still non-stationary after {} differencing round(s)",
                            meta.order
                        ),
                        "proceeding anyway; interpret this column's dynamics with care",
                    ));
                }
                let column = PreparedColumn {
                    name: col.name.clone(),
                    original: col.values.clone(),
                    transformed,
                    meta,
                };
                if is_deterministic(&column.transformed) {
                    if is_product {
                        degenerate_product = Some(column);
                    } else {
                        dropped_columns.push(col.name.clone());
                        warnings.push(Warning::new(
                            "stationarity",
                            col.name.clone(),
                            "no variation left after differencing; column dropped",
                            "a deterministic predictor carries no usable signal",
                        ));
                    }
                } else {
                    prepared.push(column);
                }
            }
            Err(Error::ConstantSeries) => {
                if is_product {
                    degenerate_product = Some(PreparedColumn {
                        name: col.name.clone(),
                        original: col.values.clone(),
                        transformed: col.values.clone(),
                        meta: DiffMeta {
                            order: 0,
                            anchors: Vec::new(),
                            achieved_stationarity: true,
                        },
                    });
                } else {
                    dropped_columns.push(col.name.clone());
                    warnings.push(Warning::new(
                        "stationarity",
                        col.name.clone(),
                        "constant series; column dropped",
                        "a constant predictor carries no usable signal",
                    ));
                }
            }
            Err(e @ Error::SeriesTooShort { .. }) => {
                if is_product {
                    return Err(e);
                }
                dropped_columns.push(col.name.clone());
                warnings.push(Warning::new(
                    "stationarity",
                    col.name.clone(),
                    "too short to test for stationarity; column dropped",
                    "extend the sample or remove the column upstream",
                ));
            }
            Err(e) => return Err(e),
        }
    }

    if let Some(column) = degenerate_product {
        warnings.push(Warning::new(
            "var",
            product,
            "series is deterministic after differencing; forecast continues its pattern",
            "no stochastic model was fitted for this product",
        ));
        let model = degenerate_model(product, &column);
        return Ok(ProductFit {
            product: product.to_string(),
            model,
            granger: None,
            gated_predictors: None,
            dropped_columns,
            degenerate: true,
        });
    }

    // The product survived as a stochastic series; run the predictive scan
    // on the aligned stationary columns.
    let mut granger = None;
    let mut gated_predictors = None;
    let scan_rows_needed = 5 * opts.granger_max_lag + 10;
    let common_len = prepared
        .iter()
        .map(|c| c.transformed.len())
        .min()
        .expect("the product column is present");
    if prepared.len() >= 2 {
        if common_len >= scan_rows_needed {
            let scan_table = aligned_table(&view, &prepared, common_len);
            let (matrix, scan_warnings) = granger_matrix(&scan_table, opts.granger_max_lag)?;
            warnings.extend(scan_warnings);
            let gate = causality_gate(&matrix, product, opts.gate_threshold)?;
            if opts.granger_filter {
                if gate.is_empty() {
                    warnings.push(Warning::new(
                        "causality",
                        product,
                        "no emission cleared the predictive gate; \
                         falling back to a univariate autoregression",
                        "rerun without --granger-filter to keep all emissions",
                    ));
                } else {
                    for column in &prepared {
                        if column.name != product && !gate.contains(&column.name) {
                            warnings.push(Warning::new(
                                "causality",
                                column.name.clone(),
                                "failed the predictive gate; excluded from the model",
                                "rerun without --granger-filter to keep all emissions",
                            ));
                        }
                    }
                }
                for column in &prepared {
                    if column.name != product && !gate.contains(&column.name) {
                        dropped_columns.push(column.name.clone());
                    }
                }
                prepared.retain(|c| c.name == product || gate.contains(&c.name));
            }
            granger = Some(matrix);
            gated_predictors = Some(gate);
        } else {
            warnings.push(Warning::new(
                "causality",
                product,
                format!(
                    "too few rows for the predictive scan \
                     (need {scan_rows_needed}, have {common_len})"
                ),
                "all emission columns are kept without screening",
            ));
        }
    }

    // Align every surviving column to the shortest transformed length by
    // trimming head values, then standardize on the aligned sample.
    let common_len = prepared
        .iter()
        .map(|c| c.transformed.len())
        .min()
        .expect("the product column is present");
    let k = prepared.len();
    let mut standardization = Vec::with_capacity(k);
    let mut data = Matrix::zeros(common_len, k);
    for (j, column) in prepared.iter().enumerate() {
        let tail = &column.transformed[column.transformed.len() - common_len..];
        let (mean, std) = mean_and_std(tail).expect("aligned columns are non-empty");
        debug_assert!(std > 0.0, "deterministic columns were filtered above");
        for (i, &v) in tail.iter().enumerate() {
            data.set(i, j, (v - mean) / std);
        }
        standardization.push((mean, std));
    }

    // Lag fallback: highest requested order first, down to one.
    let mut chosen: Option<FittedCore> = None;
    let variables: Vec<String> = prepared.iter().map(|c| c.name.clone()).collect();
    for p in (1..=opts.lag).rev() {
        if common_len >= k * p + p + 2 {
            chosen = Some(fit_transformed(&data, p, &variables)?);
            if p < opts.lag {
                warnings.push(Warning::new(
                    "var",
                    product,
                    format!("lag order reduced from {} to {p} to fit the sample", opts.lag),
                    "more rows (or fewer columns) allow a deeper model",
                ));
            }
            break;
        }
    }
    let core = chosen.ok_or(Error::InsufficientData {
        needed: k + 3,
        have: common_len,
    })?;

    if !core.spectral.is_stable() {
        warnings.push(Warning::new(
            "var",
            product,
            format!(
                "fitted model is unstable (spectral radius {:.3}); \
                 long-horizon forecasts will saturate",
                core.spectral.value
            ),
            "shorten the horizon or inspect the input series",
        ));
    }
    if !core.spectral.converged {
        warnings.push(Warning::new(
            "var",
            product,
            "spectral-radius estimate did not converge; stability reading is indicative",
            "complex dominant roots cause this; the fit itself is unaffected",
        ));
    }

    let diff_meta: Vec<DiffMeta> = prepared.iter().map(|c| c.meta.clone()).collect();
    let undiff_seeds: Vec<Vec<f64>> = prepared
        .iter()
        .map(|c| integration_seeds(&c.original, c.meta.order))
        .collect();

    let model = assemble_model(variables, core, diff_meta, standardization, undiff_seeds);
    Ok(ProductFit {
        product: product.to_string(),
        model,
        granger,
        gated_predictors,
        dropped_columns,
        degenerate: false,
    })
}

/// True when a transformed series carries no usable variation.
fn is_deterministic(transformed: &[f64]) -> bool {
    match mean_and_std(transformed) {
        Ok((mean, std)) => std <= 1e-12 * (1.0 + mean.abs()),
        Err(_) => true,
    }
}

/// Builds the stationary aligned table the predictive scan runs on.
fn aligned_table(view: &SeriesTable, prepared: &[PreparedColumn], common_len: usize) -> SeriesTable {
    let years = view.years[view.years.len() - common_len..].to_vec();
    let columns = prepared
        .iter()
        .map(|c| {
            let kind = view
                .column(&c.name)
                .expect("prepared columns come from the view")
                .kind;
            crate::ingest::Column {
                name: c.name.clone(),
                kind,
                values: c.transformed[c.transformed.len() - common_len..].to_vec(),
            }
        })
        .collect();
    SeriesTable { years, columns }
}

/// Integration seeds for undifferencing: the last training value of the
/// `j`-times-differenced series, for `j = 0..order`.
fn integration_seeds(original: &[f64], order: usize) -> Vec<f64> {
    let mut seeds = Vec::with_capacity(order);
    let mut current = original.to_vec();
    for _ in 0..order {
        seeds.push(*current.last().expect("series outlives its diff order"));
        let (next, _) = difference(&current).expect("series outlives its diff order");
        current = next;
    }
    seeds
}

/// A "model" for a product whose differenced series is deterministic: the
/// recursion is pinned at zero in standardized space, so every forecast step
/// reproduces the constant difference (or constant level, at order zero).
fn degenerate_model(product: &str, column: &PreparedColumn) -> VarModel {
    let mean = column.transformed.iter().sum::<f64>() / column.transformed.len() as f64;
    VarModel {
        variables: vec![product.to_string()],
        lag: 1,
        intercept: Vector::from_vec(vec![0.0]),
        coefficients: vec![Matrix::zeros(1, 1)],
        residual_sigma: Matrix::zeros(1, 1),
        diff_meta: vec![column.meta.clone()],
        standardization: vec![(mean, 1.0)],
        undiff_seeds: vec![integration_seeds(&column.original, column.meta.order)],
        last_transformed: vec![vec![0.0]],
        spectral: SpectralRadius {
            value: 0.0,
            converged: true,
        },
        rows_used: column.transformed.len(),
    }
}

/// Outcome of fitting one product in a batch run.
#[derive(Debug)]
pub struct ProductOutcome {
    /// The product column name.
    pub product: String,
    /// The fit, or the error that stopped it (other products keep going).
    pub result: Result<ProductFit>,
}

/// Batch report from [`fit_all_products`].
#[derive(Debug)]
pub struct FitAllReport {
    /// One outcome per product column, in table order.
    pub outcomes: Vec<ProductOutcome>,
    /// Warnings from every product's pipeline, in processing order.
    pub warnings: Vec<Warning>,
}

impl FitAllReport {
    /// The successful fits, in table order.
    pub fn successes(&self) -> impl Iterator<Item = &ProductFit> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().ok())
    }
}

/// Fits every product column of the table, capturing per-product failures
/// instead of aborting the batch.
pub fn fit_all_products(full: &SeriesTable, opts: &PipelineOptions) -> FitAllReport {
    let products: Vec<String> = full.product_columns().map(|c| c.name.clone()).collect();
    let mut warnings = Vec::new();
    let mut outcomes = Vec::with_capacity(products.len());
    for product in products {
        let result = fit_product(full, &product, opts, &mut warnings);
        if let Err(e) = &result {
            warnings.push(Warning::new(
                "var",
                product.clone(),
                format!("product skipped: {e}"),
                "see the error; the remaining products are unaffected",
            ));
        }
        outcomes.push(ProductOutcome { product, result });
    }
    FitAllReport { outcomes, warnings }
}
