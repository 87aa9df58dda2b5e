//! Granger-style predictive screening between table columns.
//!
//! For every ordered pair (x, y) the scan asks whether lags of `x` improve
//! the prediction of `y` beyond `y`'s own lags, via the classical nested
//! F-test: a restricted regression of `y` on its own `L` lags and a
//! constant, against an unrestricted one that adds `L` lags of `x`. The
//! statistic
//!
//! ```text
//! F = ((RSS_r - RSS_u) / L) / (RSS_u / (n - 2L - 1))
//! ```
//!
//! is referred to the F distribution with `(L, n - 2L - 1)` degrees of
//! freedom, the scan repeats for every lag depth `1..=max_lag`, and the
//! smallest p-value is kept — "does x help at any tested depth". The result
//! is a screening diagnostic, not a causal claim; by default the pipeline
//! only reports it, and hard filtering is opt-in.
//!
//! The scan expects stationary (already differenced) input: trending series
//! produce spurious F rejections.

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::diag::Warning;
use crate::error::{Error, Result};
use crate::ingest::SeriesTable;
use crate::numcore::{lstsq_fit, Matrix};

/// Default maximum lag depth scanned per pair.
pub const DEFAULT_GRANGER_MAX_LAG: usize = 6;

/// Default p-value threshold for the predictive gate.
pub const DEFAULT_GATE_THRESHOLD: f64 = 0.05;

/// Matrix of minimum p-values from the pairwise scans.
#[derive(Debug, Clone, PartialEq)]
pub struct GrangerMatrix {
    /// Variable names, in table order.
    pub variables: Vec<String>,
    /// `p_values[i][j]` is the minimum p-value over lags for the hypothesis
    /// "variable `i` predicts variable `j`". Diagonal entries are 1.0.
    pub p_values: Vec<Vec<f64>>,
    /// The deepest lag that was scanned.
    pub max_lag: usize,
}

impl GrangerMatrix {
    /// Minimum p-value for "`cause` predicts `effect`".
    ///
    /// # Errors
    ///
    /// [`Error::UnknownVariable`] when either name is not in the matrix.
    pub fn p_value(&self, cause: &str, effect: &str) -> Result<f64> {
        let find = |name: &str| {
            self.variables
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        Ok(self.p_values[find(cause)?][find(effect)?])
    }

    /// Renders the matrix as a fixed-width text table with predictors as
    /// `_x` columns and responses as `_y` rows.
    pub fn render_table(&self) -> String {
        let row_labels: Vec<String> = self.variables.iter().map(|v| format!("{v}_y")).collect();
        let col_labels: Vec<String> = self.variables.iter().map(|v| format!("{v}_x")).collect();
        let label_width = row_labels.iter().map(|l| l.len()).max().unwrap_or(0).max(4);
        let cell_widths: Vec<usize> = col_labels.iter().map(|l| l.len().max(6)).collect();

        let mut out = String::new();
        out.push_str(&" ".repeat(label_width));
        for (label, width) in col_labels.iter().zip(&cell_widths) {
            out.push_str(&format!("  {label:>width$}"));
        }
        out.push('\n');
        for (i, row_label) in row_labels.iter().enumerate() {
            out.push_str(&format!("{row_label:<label_width$}"));
            for (j, width) in cell_widths.iter().enumerate() {
                out.push_str(&format!("  {:>width$.4}", self.p_values[j][i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the pairwise predictive scan over every ordered pair of columns.
///
/// Pairs whose regression turns out rank-deficient (a constant column, say)
/// get the non-informative p-value 1.0 and a [`Warning`] instead of failing
/// the whole scan.
///
/// # Errors
///
/// [`Error::TooFewRows`] when the table has fewer than `5 * max_lag + 10`
/// rows — below that the deepest unrestricted regression is estimated from
/// too few residual degrees of freedom to mean anything.
///
/// # Panics
///
/// Panics if `max_lag` is zero.
pub fn granger_matrix(
    table: &SeriesTable,
    max_lag: usize,
) -> Result<(GrangerMatrix, Vec<Warning>)> {
    assert!(max_lag >= 1, "the scan needs at least lag depth one");
    let rows = table.n_rows();
    let needed = 5 * max_lag + 10;
    if rows < needed {
        return Err(Error::TooFewRows { needed, have: rows });
    }

    let k = table.n_cols();
    let variables: Vec<String> = table.columns.iter().map(|c| c.name.clone()).collect();
    let mut p_values = vec![vec![1.0f64; k]; k];
    let mut warnings = Vec::new();

    for cause in 0..k {
        for effect in 0..k {
            if cause == effect {
                continue;
            }
            match pair_min_p(
                &table.columns[cause].values,
                &table.columns[effect].values,
                max_lag,
            ) {
                Ok(p) => p_values[cause][effect] = p,
                Err(Error::RankDeficient { .. }) => {
                    warnings.push(Warning::new(
                        "causality",
                        format!("{} -> {}", variables[cause], variables[effect]),
                        "scan regression is rank deficient; pair treated as non-predictive",
                        "a constant or collinear column usually causes this; \
                         consider dropping it",
                    ));
                }
                Err(e) => return Err(e),
            }
        }
    }

    Ok((
        GrangerMatrix {
            variables,
            p_values,
            max_lag,
        },
        warnings,
    ))
}

/// Minimum p-value over lag depths `1..=max_lag` for "x predicts y".
fn pair_min_p(x: &[f64], y: &[f64], max_lag: usize) -> Result<f64> {
    let mut min_p = f64::INFINITY;
    for lag in 1..=max_lag {
        let p = pair_p_at_lag(x, y, lag)?;
        if p < min_p {
            min_p = p;
        }
    }
    Ok(min_p)
}

/// Single-depth nested F-test p-value for "x predicts y" at `lag` lags.
fn pair_p_at_lag(x: &[f64], y: &[f64], lag: usize) -> Result<f64> {
    let t = y.len();
    let n_obs = t - lag;
    let dof_denom = n_obs - 2 * lag - 1;

    let mut restricted = Matrix::zeros(n_obs, lag + 1);
    let mut unrestricted = Matrix::zeros(n_obs, 2 * lag + 1);
    let mut target = Matrix::zeros(n_obs, 1);
    for (row, ti) in (lag..t).enumerate() {
        target.set(row, 0, y[ti]);
        restricted.set(row, 0, 1.0);
        unrestricted.set(row, 0, 1.0);
        for j in 1..=lag {
            restricted.set(row, j, y[ti - j]);
            unrestricted.set(row, j, y[ti - j]);
            unrestricted.set(row, lag + j, x[ti - j]);
        }
    }

    let rss_r = lstsq_fit(&restricted, &target)?.rss[0];
    let rss_u = lstsq_fit(&unrestricted, &target)?.rss[0];
    // Nesting guarantees RSS_u <= RSS_r up to round-off; clamp the tiny
    // negative differences round-off produces and flag anything larger.
    let gain = rss_r - rss_u;
    debug_assert!(
        gain >= -1e-8 * rss_r.max(1.0),
        "unrestricted fit worse than restricted: {rss_u} > {rss_r}"
    );
    let gain = gain.max(0.0);

    let f_stat = (gain / lag as f64) / (rss_u / dof_denom as f64);
    let p = if f_stat.is_finite() {
        let dist = FisherSnedecor::new(lag as f64, dof_denom as f64)
            .expect("valid degrees of freedom");
        (1.0 - dist.cdf(f_stat)).clamp(0.0, 1.0)
    } else if gain > 0.0 {
        // Perfect unrestricted fit with real gain: overwhelming evidence.
        0.0
    } else {
        // 0/0: both fits perfect, the extra lags explain nothing.
        1.0
    };
    Ok(p)
}

/// Returns the variables whose minimum p-value against `target` clears
/// `threshold`, i.e. the predictors worth keeping, in matrix order. The
/// target itself is never included.
///
/// # Errors
///
/// [`Error::UnknownVariable`] when `target` is not in the matrix.
pub fn causality_gate(
    matrix: &GrangerMatrix,
    target: &str,
    threshold: f64,
) -> Result<Vec<String>> {
    let effect = matrix
        .variables
        .iter()
        .position(|v| v == target)
        .ok_or_else(|| Error::UnknownVariable(target.to_string()))?;
    Ok(matrix
        .variables
        .iter()
        .enumerate()
        .filter(|(cause, _)| *cause != effect && matrix.p_values[*cause][effect] < threshold)
        .map(|(_, name)| name.clone())
        .collect())
}
