//! Statistical self-checks: Monte Carlo experiments that verify the
//! estimators behave as advertised on data with known ground truth.
//!
//! Each property simulates series where the right answer is known by
//! construction — a stationary autoregression, a pure random walk, a pair
//! coupled through one lag, a vector process with known coefficients — and
//! checks that the detectors find it often enough (power) without crying
//! wolf on the null (size). The checks are seeded, so a given configuration
//! always produces the same verdicts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::causality::granger_matrix;
use crate::ingest::{Column, ColumnKind, SeriesTable};
use crate::numcore::Matrix;
use crate::stationarity::{adf_test, DEFAULT_ADF_MAX_LAG};
use crate::var::fit;

/// Configuration for a self-check run.
#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    /// Master seed; every property derives its own stream from it.
    pub seed: u64,
    /// Simulated datasets per property.
    pub trials: usize,
    /// Length of each simulated series.
    pub series_len: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 42,
            trials: 100,
            series_len: 200,
        }
    }
}

/// Verdict of one property check.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    /// Stable property name.
    pub name: String,
    /// True when the property held (vacuously true when skipped).
    pub passed: bool,
    /// True when the configuration was too small for a meaningful check.
    pub skipped: bool,
    /// Human-readable account of what was measured.
    pub detail: String,
}

impl PropertyReport {
    fn skipped(name: &str, why: &str) -> PropertyReport {
        PropertyReport {
            name: name.to_string(),
            passed: true,
            skipped: true,
            detail: why.to_string(),
        }
    }
}

/// Smallest series length at which the checks mean anything.
const MIN_SERIES_LEN: usize = 60;
/// Smallest trial count at which a rate is worth reading.
const MIN_TRIALS: usize = 10;

fn draw(rng: &mut ChaCha8Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// Simulates a mean-zero AR(1) `y_t = phi * y_{t-1} + e_t` with unit noise.
pub fn simulate_ar1(rng: &mut ChaCha8Rng, phi: f64, n: usize) -> Vec<f64> {
    let mut y = 0.0;
    (0..n)
        .map(|_| {
            y = phi * y + draw(rng);
            y
        })
        .collect()
}

/// Simulates a pure random walk with unit-variance increments.
pub fn simulate_random_walk(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut y = 0.0;
    (0..n)
        .map(|_| {
            y += draw(rng);
            y
        })
        .collect()
}

/// Simulates a one-way coupled pair: `x` is white noise and
/// `y_t = beta * x_{t-1} + e_t`, so `x` predicts `y` but not vice versa.
pub fn simulate_lagged_pair(rng: &mut ChaCha8Rng, beta: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut prev_x = draw(rng);
    for _ in 0..n {
        let x = draw(rng);
        let y = beta * prev_x + draw(rng);
        prev_x = x;
        xs.push(x);
        ys.push(y);
    }
    (xs, ys)
}

/// Simulates two independent white-noise series.
pub fn simulate_independent_pair(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let xs = (0..n).map(|_| draw(rng)).collect();
    let ys = (0..n).map(|_| draw(rng)).collect();
    (xs, ys)
}

/// Ground-truth coefficients of the three-variable order-two process used
/// by the recovery check. The companion spectral radius is about 0.6, so
/// simulations settle quickly.
pub fn var2_truth() -> (Vec<f64>, Vec<Matrix>) {
    let intercept = vec![0.2, -0.1, 0.3];
    let a1 = Matrix::new(
        3,
        3,
        vec![0.5, 0.1, 0.0, 0.0, 0.4, 0.1, 0.1, 0.0, 0.3],
    );
    let a2 = Matrix::new(
        3,
        3,
        vec![-0.2, 0.0, 0.05, 0.05, -0.1, 0.0, 0.0, 0.05, -0.15],
    );
    (intercept, vec![a1, a2])
}

/// Simulates the [`var2_truth`] process for `n` observations after a
/// 50-step burn-in, returned as one column per variable.
pub fn simulate_var2(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let (intercept, coefficients) = var2_truth();
    let k = 3;
    let mut prev = vec![0.0; k];
    let mut prev2 = vec![0.0; k];
    let mut columns: Vec<Vec<f64>> = (0..k).map(|_| Vec::with_capacity(n)).collect();
    for step in 0..n + 50 {
        let mut next = intercept.clone();
        for (eq, entry) in next.iter_mut().enumerate() {
            for var in 0..k {
                *entry += coefficients[0].get(eq, var) * prev[var];
                *entry += coefficients[1].get(eq, var) * prev2[var];
            }
            *entry += draw(rng);
        }
        prev2 = prev;
        prev = next.clone();
        if step >= 50 {
            for (var, column) in columns.iter_mut().enumerate() {
                column.push(next[var]);
            }
        }
    }
    columns
}

fn pair_table(xs: Vec<f64>, ys: Vec<f64>) -> SeriesTable {
    let n = xs.len();
    SeriesTable {
        years: (0..n as i32).collect(),
        columns: vec![
            Column {
                name: "x".to_string(),
                kind: ColumnKind::Emission,
                values: xs,
            },
            Column {
                name: "y".to_string(),
                kind: ColumnKind::Production,
                values: ys,
            },
        ],
    }
}

/// Power of the unit-root test: a stationary AR(1) with coefficient 0.5
/// should be called stationary in at least 90% of trials.
pub fn unit_root_power(config: &SelftestConfig) -> PropertyReport {
    let name = "unit-root-power";
    if config.series_len < MIN_SERIES_LEN || config.trials < MIN_TRIALS {
        return PropertyReport::skipped(name, "sample too small for a meaningful rate");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5161);
    let mut hits = 0usize;
    for _ in 0..config.trials {
        let series = simulate_ar1(&mut rng, 0.5, config.series_len);
        let result = adf_test(&series, DEFAULT_ADF_MAX_LAG).expect("simulated series is testable");
        if result.is_stationary_5pct {
            hits += 1;
        }
    }
    let rate = hits as f64 / config.trials as f64;
    PropertyReport {
        name: name.to_string(),
        passed: rate >= 0.90,
        skipped: false,
        detail: format!(
            "called {hits}/{} stationary AR(1) series stationary (need >= 90%)",
            config.trials
        ),
    }
}

/// Size of the unit-root test: a pure random walk should be called
/// stationary in at most 15% of trials.
pub fn unit_root_size(config: &SelftestConfig) -> PropertyReport {
    let name = "unit-root-size";
    if config.series_len < MIN_SERIES_LEN || config.trials < MIN_TRIALS {
        return PropertyReport::skipped(name, "sample too small for a meaningful rate");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5162);
    let mut false_hits = 0usize;
    for _ in 0..config.trials {
        let series = simulate_random_walk(&mut rng, config.series_len);
        let result = adf_test(&series, DEFAULT_ADF_MAX_LAG).expect("simulated series is testable");
        if result.is_stationary_5pct {
            false_hits += 1;
        }
    }
    let rate = false_hits as f64 / config.trials as f64;
    PropertyReport {
        name: name.to_string(),
        passed: rate <= 0.15,
        skipped: false,
        detail: format!(
            "called {false_hits}/{} random walks stationary (allow <= 15%)",
            config.trials
        ),
    }
}

/// Power and direction of the predictive scan: with `y` driven by `x` at
/// one lag, the scan at lag cap 1 should put `p(x -> y)` below 0.01 and
/// `p(y -> x)` above 0.05 in at least 90% of trials.
pub fn predictive_scan_power(config: &SelftestConfig) -> PropertyReport {
    let name = "predictive-scan-power";
    if config.series_len < MIN_SERIES_LEN || config.trials < MIN_TRIALS {
        return PropertyReport::skipped(name, "sample too small for a meaningful rate");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5163);
    let mut hits = 0usize;
    for _ in 0..config.trials {
        let (xs, ys) = simulate_lagged_pair(&mut rng, 0.8, config.series_len);
        let table = pair_table(xs, ys);
        let (matrix, _) = granger_matrix(&table, 1).expect("simulated table is scannable");
        let forward = matrix.p_value("x", "y").expect("x and y are present");
        let backward = matrix.p_value("y", "x").expect("x and y are present");
        if forward < 0.01 && backward > 0.05 {
            hits += 1;
        }
    }
    let rate = hits as f64 / config.trials as f64;
    PropertyReport {
        name: name.to_string(),
        passed: rate >= 0.90,
        skipped: false,
        detail: format!(
            "recovered the one-way coupling with correct direction in {hits}/{} trials \
             (need >= 90%)",
            config.trials
        ),
    }
}

/// Size of the predictive scan: on independent series the scan at lag cap 1
/// should report `p(x -> y) < 0.05` in at most 15% of trials.
pub fn predictive_scan_size(config: &SelftestConfig) -> PropertyReport {
    let name = "predictive-scan-size";
    if config.series_len < MIN_SERIES_LEN || config.trials < MIN_TRIALS {
        return PropertyReport::skipped(name, "sample too small for a meaningful rate");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5164);
    let mut false_hits = 0usize;
    for _ in 0..config.trials {
        let (xs, ys) = simulate_independent_pair(&mut rng, config.series_len);
        let table = pair_table(xs, ys);
        let (matrix, _) = granger_matrix(&table, 1).expect("simulated table is scannable");
        if matrix.p_value("x", "y").expect("x and y are present") < 0.05 {
            false_hits += 1;
        }
    }
    let rate = false_hits as f64 / config.trials as f64;
    PropertyReport {
        name: name.to_string(),
        passed: rate <= 0.15,
        skipped: false,
        detail: format!(
            "flagged {false_hits}/{} independent pairs as coupled (allow <= 15%)",
            config.trials
        ),
    }
}

/// Number of simulations the recovery check averages over.
const RECOVERY_SIMS: usize = 20;

/// Recovery of known coefficients: fitting an order-two, three-variable
/// model to its own simulations should land within 0.08 mean absolute
/// error of the true coefficient entries.
pub fn var_recovery(config: &SelftestConfig) -> PropertyReport {
    let name = "var-recovery";
    if config.series_len < MIN_SERIES_LEN || config.trials < MIN_TRIALS {
        return PropertyReport::skipped(name, "sample too small for a meaningful rate");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5165);
    let (_, truth) = var2_truth();
    let mut total_error = 0.0;
    let mut entries = 0usize;
    for _ in 0..RECOVERY_SIMS {
        let columns = simulate_var2(&mut rng, config.series_len);
        let n = columns[0].len();
        let table = SeriesTable {
            years: (0..n as i32).collect(),
            columns: columns
                .into_iter()
                .enumerate()
                .map(|(i, values)| Column {
                    name: format!("v{}", i + 1),
                    kind: ColumnKind::Emission,
                    values,
                })
                .collect(),
        };
        let model = fit(&table, 2).expect("simulated process is identifiable");
        for (a_hat, a_true) in model.coefficients.iter().zip(&truth) {
            for eq in 0..3 {
                for var in 0..3 {
                    total_error += (a_hat.get(eq, var) - a_true.get(eq, var)).abs();
                    entries += 1;
                }
            }
        }
    }
    let mean_error = total_error / entries as f64;
    PropertyReport {
        name: name.to_string(),
        passed: mean_error < 0.08,
        skipped: false,
        detail: format!(
            "mean absolute coefficient error {mean_error:.4} over {RECOVERY_SIMS} simulations \
             (need < 0.08)"
        ),
    }
}

/// Runs every property with the given configuration.
pub fn run_all(config: &SelftestConfig) -> Vec<PropertyReport> {
    vec![
        unit_root_power(config),
        unit_root_size(config),
        predictive_scan_power(config),
        predictive_scan_size(config),
        var_recovery(config),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::companion_spectral_radius;

    #[test]
    fn recovery_truth_is_a_stable_process() {
        let (_, coefficients) = var2_truth();
        let radius = companion_spectral_radius(&coefficients);
        assert!(radius.value < 1.0, "radius was {}", radius.value);
    }

    #[test]
    fn lagged_pair_couples_in_one_direction_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (xs, ys) = simulate_lagged_pair(&mut rng, 0.8, 400);
        // Correlation of y_t with x_{t-1} should be strong; with x_t weak.
        let corr = |a: &[f64], b: &[f64]| {
            let n = a.len() as f64;
            let ma = a.iter().sum::<f64>() / n;
            let mb = b.iter().sum::<f64>() / n;
            let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
            let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
            let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
            cov / (va.sqrt() * vb.sqrt())
        };
        let lagged = corr(&xs[..399], &ys[1..]);
        let same_time = corr(&xs, &ys);
        assert!(lagged > 0.5, "lagged correlation was {lagged}");
        assert!(same_time.abs() < 0.2, "same-time correlation was {same_time}");
    }

    #[test]
    fn tiny_configurations_skip_instead_of_failing() {
        let config = SelftestConfig {
            seed: 1,
            trials: 2,
            series_len: 30,
        };
        for report in run_all(&config) {
            assert!(report.skipped, "{} did not skip", report.name);
            assert!(report.passed);
        }
    }

    #[test]
    fn default_configuration_passes_every_property() {
        for report in run_all(&SelftestConfig::default()) {
            assert!(
                report.passed && !report.skipped,
                "{} failed: {}",
                report.name,
                report.detail
            );
        }
    }
}
