//! Dense numeric primitives: matrices, least squares, spectral radius.
//!
//! Everything downstream (unit-root tests, causality scans, autoregression
//! fitting) reduces to ordinary least squares on small dense matrices, so
//! this module provides exactly that and nothing more: a row-major [`Matrix`],
//! a QR-based [`lstsq`] solver, a power-iteration [`companion_spectral_radius`]
//! for stability diagnostics, and [`mean_and_std`].
//!
//! The solver goes through an orthogonal (Householder) factorization rather
//! than the normal equations: squaring the condition number of a design
//! matrix built from slow-moving annual series is exactly how coefficient
//! estimates go quietly wrong.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for declaring a design matrix rank deficient: a
/// diagonal element of the triangular factor below this fraction of the
/// largest diagonal element marks its column as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Maximum number of power-iteration steps for spectral-radius estimation.
pub const POWER_ITERATIONS: usize = 500;

/// Convergence tolerance on successive spectral-radius estimates.
pub const POWER_TOLERANCE: f64 = 1e-9;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data.
    ///
    /// # Panics
    ///
    /// Panics if `data.len() != rows * cols`. Debug builds additionally
    /// reject non-finite entries, which are never legitimate here.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "matrix data length {} does not match {} x {}",
            data.len(),
            rows,
            cols
        );
        debug_assert!(
            data.iter().all(|v| v.is_finite()),
            "matrix entries must be finite"
        );
        Matrix { rows, cols, data }
    }

    /// Builds an all-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds the `n` x `n` identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from a slice of equal-length rows.
    ///
    /// # Panics
    ///
    /// Panics if the rows have unequal lengths or there are no rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "all rows must have the same length");
            data.extend_from_slice(row);
        }
        Matrix::new(rows.len(), cols, data)
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Value at (`r`, `c`).
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    /// Overwrites the value at (`r`, `c`).
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    /// Borrow of row `r`.
    pub fn row(&self, r: usize) -> &[f64] {
        debug_assert!(r < self.rows);
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copy of column `c`.
    pub fn col(&self, c: usize) -> Vec<f64> {
        debug_assert!(c < self.cols);
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Matrix product `self * other`.
    ///
    /// # Panics
    ///
    /// Panics if the inner dimensions disagree.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for inner in 0..self.cols {
                let lhs = self.get(r, inner);
                if lhs == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += lhs * other.get(inner, c);
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    ///
    /// # Panics
    ///
    /// Panics if `v.len()` does not match the column count.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Fixed-length numeric vector with finite entries.
///
/// Thin wrapper over `Vec<f64>` used where a value is semantically a vector
/// (model intercepts, residual rows) rather than an arbitrary buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    /// Wraps a `Vec<f64>`. Debug builds reject non-finite entries.
    pub fn from_vec(data: Vec<f64>) -> Self {
        debug_assert!(
            data.iter().all(|v| v.is_finite()),
            "vector entries must be finite"
        );
        Vector { data }
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// True when the vector has no entries.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Borrow of the underlying slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

/// Full output of a least-squares solve: the coefficients plus the pieces
/// needed for t-ratios and F-tests downstream.
#[derive(Debug, Clone)]
pub struct LstsqFit {
    /// Coefficient matrix `B` (`design.cols()` x `targets.cols()`).
    pub coefficients: Matrix,
    /// Diagonal of `(X^T X)^-1`, one entry per design column; multiply by the
    /// residual variance to get squared standard errors.
    pub xtx_inv_diag: Vec<f64>,
    /// Residual sum of squares, one entry per target column.
    pub rss: Vec<f64>,
    /// Number of observations (design rows).
    pub rows: usize,
}

/// Solves the least-squares problem `design * B ~ targets` and returns `B`.
///
/// Multiple target columns are solved jointly against one factorization,
/// which is what stacked-regression autoregression fitting needs.
///
/// # Errors
///
/// [`Error::RankDeficient`] when some diagonal element of the triangular
/// factor falls below [`RANK_TOLERANCE`] times the largest one, i.e. the
/// design columns are numerically dependent.
///
/// # Panics
///
/// Panics if the design has fewer rows than columns or the row counts of
/// `design` and `targets` disagree; callers are expected to check
/// feasibility before building the system.
pub fn lstsq(design: &Matrix, targets: &Matrix) -> Result<Matrix> {
    Ok(lstsq_fit(design, targets)?.coefficients)
}

/// Like [`lstsq`] but also returns residual sums of squares and the diagonal
/// of `(X^T X)^-1` for standard-error computation.
pub fn lstsq_fit(design: &Matrix, targets: &Matrix) -> Result<LstsqFit> {
    let n = design.rows();
    let m = design.cols();
    let q = targets.cols();
    assert!(
        n >= m,
        "least squares needs at least as many rows ({n}) as columns ({m})"
    );
    assert_eq!(
        targets.rows(),
        n,
        "design and targets must have the same row count"
    );

    // Householder QR applied in place to a working copy of the design,
    // with every reflection mirrored onto the targets.
    let mut r = design.clone();
    let mut b = targets.clone();
    for j in 0..m {
        // Norm of the j-th column at and below the diagonal.
        let mut norm = 0.0f64;
        for i in j..n {
            norm = norm.hypot(r.get(i, j));
        }
        if norm == 0.0 {
            // Column already zero below and at the diagonal; the rank check
            // below will flag it.
            continue;
        }
        // Reflector v = x + sign(x0) * ||x|| * e1, with sign(0) = +1 so the
        // leading term never cancels.
        let x0 = r.get(j, j);
        let alpha = if x0 >= 0.0 { norm } else { -norm };
        let mut v = vec![0.0; n - j];
        v[0] = x0 + alpha;
        for i in (j + 1)..n {
            v[i - j] = r.get(i, j);
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // Apply I - beta v v^T to the trailing columns of r.
        for c in j..m {
            let dot: f64 = (j..n).map(|i| v[i - j] * r.get(i, c)).sum();
            let scale = beta * dot;
            for i in j..n {
                let val = r.get(i, c) - scale * v[i - j];
                r.set(i, c, val);
            }
        }
        // ... and to every target column.
        for c in 0..q {
            let dot: f64 = (j..n).map(|i| v[i - j] * b.get(i, c)).sum();
            let scale = beta * dot;
            for i in j..n {
                let val = b.get(i, c) - scale * v[i - j];
                b.set(i, c, val);
            }
        }
    }

    // Rank check on the triangular diagonal, relative to its largest entry.
    let mut largest = 0.0f64;
    for j in 0..m {
        largest = largest.max(r.get(j, j).abs());
    }
    for j in 0..m {
        if r.get(j, j).abs() < RANK_TOLERANCE * largest || largest == 0.0 {
            return Err(Error::RankDeficient {
                column: j,
                detail: format!("design column {j}"),
            });
        }
    }

    // Back-substitution per target column.
    let mut coefficients = Matrix::zeros(m, q);
    for c in 0..q {
        for i in (0..m).rev() {
            let mut acc = b.get(i, c);
            for k in (i + 1)..m {
                acc -= r.get(i, k) * coefficients.get(k, c);
            }
            coefficients.set(i, c, acc / r.get(i, i));
        }
    }

    // diag((X^T X)^-1) = row-wise squared norms of R^-1, since
    // (X^T X)^-1 = R^-1 R^-T.
    let rinv = invert_upper_triangular(&r, m);
    let xtx_inv_diag: Vec<f64> = (0..m)
        .map(|i| (i..m).map(|k| rinv.get(i, k).powi(2)).sum())
        .collect();

    // Residual sums of squares against the original (untransformed) system.
    let predicted = design.matmul(&coefficients);
    let rss: Vec<f64> = (0..q)
        .map(|c| {
            (0..n)
                .map(|i| {
                    let e = targets.get(i, c) - predicted.get(i, c);
                    e * e
                })
                .sum()
        })
        .collect();

    Ok(LstsqFit {
        coefficients,
        xtx_inv_diag,
        rss,
        rows: n,
    })
}

/// Inverts the leading `m` x `m` upper-triangular block of `r`.
///
/// Only called after the rank check, so the diagonal is safely away from
/// zero.
fn invert_upper_triangular(r: &Matrix, m: usize) -> Matrix {
    let mut inv = Matrix::zeros(m, m);
    for c in (0..m).rev() {
        inv.set(c, c, 1.0 / r.get(c, c));
        for i in (0..c).rev() {
            let mut acc = 0.0;
            for k in (i + 1)..=c {
                acc += r.get(i, k) * inv.get(k, c);
            }
            inv.set(i, c, -acc / r.get(i, i));
        }
    }
    inv
}

/// Spectral-radius estimate together with a convergence flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRadius {
    /// Estimated largest eigenvalue modulus of the companion matrix.
    pub value: f64,
    /// False when power iteration hit [`POWER_ITERATIONS`] steps without the
    /// estimate settling; the value is then the last iterate and should be
    /// treated as indicative only.
    pub converged: bool,
}

impl SpectralRadius {
    /// True when the estimate certifies a stable autoregression (radius
    /// strictly below one).
    pub fn is_stable(&self) -> bool {
        self.value < 1.0
    }
}

/// Estimates the spectral radius of the companion matrix of a lag-polynomial
/// coefficient stack `[A_1, ..., A_p]` (each `k` x `k`) by power iteration.
///
/// The companion matrix puts the coefficient blocks in its first block row
/// and identity blocks on the subdiagonal, so its largest eigenvalue modulus
/// decides the stability of the autoregression. Iteration stops after
/// [`POWER_ITERATIONS`] steps or when successive estimates agree within
/// [`POWER_TOLERANCE`]; non-convergence (which a complex dominant eigenvalue
/// pair can cause) is reported via the flag, not an error.
///
/// # Panics
///
/// Panics if the stack is empty or the blocks are not square and uniformly
/// sized.
pub fn companion_spectral_radius(coefficients: &[Matrix]) -> SpectralRadius {
    let p = coefficients.len();
    assert!(p >= 1, "need at least one coefficient matrix");
    let k = coefficients[0].rows();
    for a in coefficients {
        assert!(
            a.rows() == k && a.cols() == k,
            "coefficient matrices must all be {k} x {k}"
        );
    }

    let dim = k * p;
    let mut companion = Matrix::zeros(dim, dim);
    for (lag, a) in coefficients.iter().enumerate() {
        for r in 0..k {
            for c in 0..k {
                companion.set(r, lag * k + c, a.get(r, c));
            }
        }
    }
    for i in 0..dim - k {
        companion.set(k + i, i, 1.0);
    }

    // Power iteration from a uniform start vector. The ratio ||Cv|| / ||v||
    // (with v kept at unit norm) converges to the dominant eigenvalue
    // modulus whenever one exists and the start vector is not orthogonal to
    // its eigenvector.
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut estimate = 0.0f64;
    let mut previous = f64::INFINITY;
    for _ in 0..POWER_ITERATIONS {
        let w = companion.mul_vec(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // The iterate died: the matrix is nilpotent along this direction,
            // and the spectral radius of a companion matrix that annihilates
            // a full power sequence is zero.
            return SpectralRadius {
                value: 0.0,
                converged: true,
            };
        }
        estimate = norm;
        if (estimate - previous).abs() < POWER_TOLERANCE {
            return SpectralRadius {
                value: estimate,
                converged: true,
            };
        }
        previous = estimate;
        for (slot, value) in v.iter_mut().zip(&w) {
            *slot = value / norm;
        }
    }
    SpectralRadius {
        value: estimate,
        converged: false,
    }
}

/// Mean and sample standard deviation (divisor `n - 1`).
///
/// A single observation has no spread to estimate; by convention its
/// standard deviation is reported as `0.0`.
///
/// # Errors
///
/// [`Error::EmptyInput`] when `values` is empty.
pub fn mean_and_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Brute-force eigenvalue-modulus oracle for 2 x 2 matrices via the
    /// characteristic polynomial. Complex pairs share modulus sqrt(det).
    fn eig_radius_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
        let tr = a + d;
        let det = a * d - b * c;
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            let root = disc.sqrt();
            ((tr + root) / 2.0).abs().max(((tr - root) / 2.0).abs())
        } else {
            det.sqrt()
        }
    }

    #[test]
    fn matmul_and_transpose_agree_with_hand_computation() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let b = Matrix::from_rows(&[vec![7.0, 8.0], vec![9.0, 10.0]]);
        let ab = a.matmul(&b);
        assert_eq!(ab.row(0), &[25.0, 28.0]);
        assert_eq!(ab.row(1), &[57.0, 64.0]);
        assert_eq!(ab.row(2), &[89.0, 100.0]);
        let at = a.transpose();
        assert_eq!(at.rows(), 2);
        assert_eq!(at.cols(), 3);
        assert_eq!(at.row(0), &[1.0, 3.0, 5.0]);
    }

    #[test]
    fn lstsq_recovers_exact_line() {
        // y = 1 + 2x fitted through three exact points.
        let design = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]);
        let targets = Matrix::new(3, 1, vec![1.0, 3.0, 5.0]);
        let b = lstsq(&design, &targets).unwrap();
        assert_abs_diff_eq!(b.get(0, 0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.get(1, 0), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn lstsq_matches_closed_form_simple_regression() {
        // Overdetermined fit; closed-form slope = Sxy/Sxx = 7/5, intercept
        // = ybar - slope * xbar = 2 - 1.4 * 1.5 = -0.1.
        let design = Matrix::from_rows(&[
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
        ]);
        let targets = Matrix::new(4, 1, vec![0.0, 1.0, 3.0, 4.0]);
        let fit = lstsq_fit(&design, &targets).unwrap();
        assert_abs_diff_eq!(fit.coefficients.get(0, 0), -0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients.get(1, 0), 1.4, epsilon = 1e-12);
        // Residuals: y_hat = [-0.1, 1.3, 2.7, 4.1], e = [0.1, -0.3, 0.3, -0.1],
        // RSS = 0.01 + 0.09 + 0.09 + 0.01 = 0.2.
        assert_abs_diff_eq!(fit.rss[0], 0.2, epsilon = 1e-12);
        assert_eq!(fit.rows, 4);
    }

    #[test]
    fn lstsq_xtx_inverse_diagonal_matches_hand_inverse() {
        // For design [[1,0],[1,1],[1,2],[1,3]]: X^T X = [[4,6],[6,14]],
        // det = 20, inverse = [[0.7,-0.3],[-0.3,0.2]].
        let design = Matrix::from_rows(&[
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
        ]);
        let targets = Matrix::new(4, 1, vec![0.0, 1.0, 3.0, 4.0]);
        let fit = lstsq_fit(&design, &targets).unwrap();
        assert_abs_diff_eq!(fit.xtx_inv_diag[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.xtx_inv_diag[1], 0.2, epsilon = 1e-12);
    }

    #[test]
    fn lstsq_flags_duplicate_columns_as_rank_deficient() {
        let design = Matrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]);
        let targets = Matrix::new(3, 1, vec![1.0, 2.0, 3.0]);
        match lstsq(&design, &targets) {
            Err(Error::RankDeficient { column, .. }) => assert_eq!(column, 1),
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn lstsq_flags_all_zero_design() {
        let design = Matrix::zeros(3, 2);
        let targets = Matrix::new(3, 1, vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            lstsq(&design, &targets),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn lstsq_joint_targets_match_column_by_column_solves() {
        let design = Matrix::from_rows(&[
            vec![1.0, 0.5, -0.2],
            vec![1.0, -1.0, 0.4],
            vec![1.0, 2.0, 1.0],
            vec![1.0, 0.0, -1.5],
            vec![1.0, 1.5, 0.3],
        ]);
        let y1 = vec![0.2, -0.4, 1.9, -1.0, 1.1];
        let y2 = vec![3.0, 1.0, 0.5, 2.0, -0.7];
        let joint_targets = Matrix::from_rows(
            &y1.iter()
                .zip(&y2)
                .map(|(a, b)| vec![*a, *b])
                .collect::<Vec<_>>(),
        );
        let joint = lstsq(&design, &joint_targets).unwrap();
        let single1 = lstsq(&design, &Matrix::new(5, 1, y1)).unwrap();
        let single2 = lstsq(&design, &Matrix::new(5, 1, y2)).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(joint.get(i, 0), single1.get(i, 0), epsilon = 1e-12);
            assert_abs_diff_eq!(joint.get(i, 1), single2.get(i, 0), epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_radius_of_scalar_two_lag_stack() {
        // Companion of the scalar recurrence y_t = 0.5 y_{t-1} + 0.3 y_{t-2}
        // is [[0.5, 0.3], [1, 0]]; its dominant eigenvalue is the larger root
        // of x^2 - 0.5x - 0.3 = 0, i.e. (0.5 + sqrt(1.45)) / 2.
        let a1 = Matrix::new(1, 1, vec![0.5]);
        let a2 = Matrix::new(1, 1, vec![0.3]);
        let expected = (0.5 + 1.45f64.sqrt()) / 2.0;
        let radius = companion_spectral_radius(&[a1, a2]);
        assert!(radius.converged);
        assert_abs_diff_eq!(radius.value, expected, epsilon = 1e-6);
        assert!(radius.is_stable());
    }

    #[test]
    fn spectral_radius_flags_explosive_single_lag() {
        let radius = companion_spectral_radius(&[Matrix::new(1, 1, vec![1.2])]);
        assert!(radius.converged);
        assert_abs_diff_eq!(radius.value, 1.2, epsilon = 1e-8);
        assert!(!radius.is_stable());
    }

    #[test]
    fn spectral_radius_of_zero_stack_is_zero() {
        let radius = companion_spectral_radius(&[Matrix::zeros(2, 2)]);
        assert!(radius.converged);
        assert_eq!(radius.value, 0.0);
    }

    #[test]
    fn spectral_radius_matches_eigenvalue_oracle_on_2x2() {
        let cases = [
            [0.9, 0.2, 0.1, 0.5],
            [0.3, 0.7, 0.6, 0.2],
            [1.1, 0.05, 0.4, 0.9],
            [0.25, 0.25, 0.25, 0.25],
        ];
        for [a, b, c, d] in cases {
            let m = Matrix::from_rows(&[vec![a, b], vec![c, d]]);
            let expected = eig_radius_2x2(a, b, c, d);
            let radius = companion_spectral_radius(&[m]);
            assert!(radius.converged, "case {a},{b},{c},{d} did not converge");
            assert_abs_diff_eq!(radius.value, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn spectral_radius_invariant_under_permutation_similarity() {
        // Swapping both rows and columns (P A P^T) relabels the variables and
        // must not change the spectrum.
        let a = Matrix::from_rows(&[vec![0.8, 0.3], vec![0.1, 0.4]]);
        let swapped = Matrix::from_rows(&[vec![0.4, 0.1], vec![0.3, 0.8]]);
        let r1 = companion_spectral_radius(&[a]);
        let r2 = companion_spectral_radius(&[swapped]);
        assert_abs_diff_eq!(r1.value, r2.value, epsilon = 1e-8);
    }

    #[test]
    fn spectral_radius_of_scaled_rotation_matches_scale() {
        // A scaled rotation has a complex eigenvalue pair of modulus r; the
        // norm ratio is exactly r at every step, so the estimate is exact.
        let theta = 0.4f64;
        let r = 0.95f64;
        let m = Matrix::from_rows(&[
            vec![r * theta.cos(), -r * theta.sin()],
            vec![r * theta.sin(), r * theta.cos()],
        ]);
        let radius = companion_spectral_radius(&[m]);
        assert_abs_diff_eq!(radius.value, r, epsilon = 1e-9);
    }

    #[test]
    fn mean_and_std_matches_hand_computation() {
        // For the pair {0.0051, 0.0157}: mean 0.0104, deviations +-0.0053,
        // sample std = 0.0053 * sqrt(2).
        let (mean, std) = mean_and_std(&[0.0051, 0.0157]).unwrap();
        assert_abs_diff_eq!(mean, 0.0104, epsilon = 1e-15);
        assert_abs_diff_eq!(std, 0.0053 * 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn mean_and_std_single_value_has_zero_spread() {
        let (mean, std) = mean_and_std(&[5.0]).unwrap();
        assert_eq!(mean, 5.0);
        assert_eq!(std, 0.0);
    }

    #[test]
    fn mean_and_std_rejects_empty_input() {
        assert!(matches!(mean_and_std(&[]), Err(Error::EmptyInput)));
    }
}
