//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. The variants
//! are grouped by the pipeline stage that raises them; all of them are
//! recoverable in the sense that the caller can skip the offending column,
//! product, or file and keep going.

use thiserror::Error;

/// Errors raised by the ingestion, statistics, and forecasting stages.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation that needs at least one value received none.
    #[error("empty input: at least one value is required")]
    EmptyInput,

    /// The least-squares design matrix has (numerically) dependent columns.
    #[error("rank-deficient design: {detail}")]
    RankDeficient {
        /// Zero-based index of the first dependent design column.
        column: usize,
        /// Human-readable name of the offending column, when known.
        detail: String,
    },

    /// A required CSV header column is absent.
    #[error("missing required column `{0}` in CSV header")]
    MissingColumn(String),

    /// The CSV input has no header row at all.
    #[error("empty CSV input: no header row found")]
    EmptyFile,

    /// No record matched the requested area filter.
    #[error("area `{0}` matched no records (check the spelling of the area name)")]
    AreaNotFound(String),

    /// Two records map to the same (item, element, year) pivot cell.
    #[error("duplicate cell for item `{item}`, element `{element}`, year {year}")]
    DuplicateCell {
        item: String,
        element: String,
        year: i32,
    },

    /// Every pivoted column contained at least one gap, so nothing survived.
    #[error("every column contained gaps; no complete series survive scraping")]
    AllColumnsDropped,

    /// The requested product does not name a product column of the table.
    #[error("unknown product column `{0}`")]
    UnknownProduct(String),

    /// A series is too short for the requested statistical procedure.
    #[error("series too short: need at least {needed} observations, have {have}")]
    SeriesTooShort { needed: usize, have: usize },

    /// A series is (numerically) constant, so regression-based tests cannot run.
    #[error("constant series: unit-root regression is degenerate")]
    ConstantSeries,

    /// Undifferencing was given the wrong number of seed values.
    #[error("order mismatch: differencing order {order} needs {order} seed values, got {seeds}")]
    OrderMismatch { order: usize, seeds: usize },

    /// The table has too few rows for the requested causality scan.
    #[error("too few rows for causality scan: need at least {needed}, have {have}")]
    TooFewRows { needed: usize, have: usize },

    /// A variable name is not present in the matrix or table at hand.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    /// Not enough rows to identify the requested autoregression.
    #[error("insufficient data: need at least {needed} rows, have {have}")]
    InsufficientData { needed: usize, have: usize },

    /// A train/test split left one side empty.
    #[error("degenerate split: {train_rows} training rows, {test_rows} test rows")]
    DegenerateSplit { train_rows: usize, test_rows: usize },

    /// Two paired sequences differ in length.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A serialized model carries an unsupported schema tag.
    #[error("unsupported model schema `{found}` (expected `{expected}`)")]
    SchemaMismatch { expected: String, found: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV-level parse failure (malformed framing, not malformed values).
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON (de)serialization failure for model dumps.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
