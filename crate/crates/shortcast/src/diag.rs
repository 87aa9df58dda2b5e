//! Structured warnings surfaced by the pipeline.
//!
//! The pipeline prefers degrading gracefully (dropping a column, reducing a
//! lag order) over aborting a whole run, and every such decision is recorded
//! as a [`Warning`] so the diagnostics output can explain exactly what was
//! skipped and why.

use std::fmt;

/// A non-fatal pipeline event: which stage raised it, which column or
/// product it concerns, what happened, and what the operator can do about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    /// Pipeline stage that raised the warning (e.g. `"ingest"`, `"var"`).
    pub module: &'static str,
    /// The column, product, or file the warning is about.
    pub subject: String,
    /// What happened.
    pub message: String,
    /// What the operator can do about it.
    pub hint: String,
}

impl Warning {
    /// Builds a warning; arguments mirror the fields.
    pub fn new(
        module: &'static str,
        subject: impl Into<String>,
        message: impl Into<String>,
        hint: impl Into<String>,
    ) -> Self {
        Warning {
            module,
            subject: subject.into(),
            message: message.into(),
            hint: hint.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} (hint: {})",
            self.module, self.subject, self.message, self.hint
        )
    }
}
