//! Error types shared across the library.

use thiserror::Error;

/// A constructor argument violated a documented precondition.
///
/// `field` names the offending parameter so callers can surface precise
/// messages without string matching.
#[derive(Debug, Clone, Error)]
#[error("invalid {field}: {reason}")]
pub struct DomainError {
    pub field: &'static str,
    pub reason: String,
}

impl DomainError {
    pub fn new(field: &'static str, reason: impl Into<String>) -> Self {
        DomainError {
            field,
            reason: reason.into(),
        }
    }
}

/// Joining a score set against trial records failed.
///
/// Carries at most the first [`JoinError::LISTED`] offending trial ids per
/// category plus full counts, so messages stay bounded on large files.
#[derive(Debug, Clone, Error)]
#[error("{}", self.render())]
pub struct JoinError {
    /// Trial ids present in the scores but absent from the records.
    pub missing: Vec<String>,
    pub missing_total: usize,
    /// Trial ids that appear more than once in the records.
    pub duplicated: Vec<String>,
    pub duplicated_total: usize,
}

impl JoinError {
    /// Maximum number of ids retained per category.
    pub const LISTED: usize = 10;

    fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.missing_total > 0 {
            parts.push(format!(
                "{} trial id(s) missing from records (first {}: {})",
                self.missing_total,
                self.missing.len(),
                self.missing.join(", ")
            ));
        }
        if self.duplicated_total > 0 {
            parts.push(format!(
                "{} trial id(s) duplicated in records (first {}: {})",
                self.duplicated_total,
                self.duplicated.len(),
                self.duplicated.join(", ")
            ));
        }
        if parts.is_empty() {
            parts.push("join failed".to_owned());
        }
        parts.join("; ")
    }
}

/// A metric could not be computed from the given data.
#[derive(Debug, Clone, Error)]
pub enum MetricError {
    /// A score bucket that the metric divides by was empty.
    #[error("empty {class} bucket: at least one score is required")]
    EmptyClass { class: &'static str },
    /// The inputs admit no meaningful value (for example an ASV operating
    /// point no better than chance, which makes the t-DCF coefficients
    /// collapse).
    #[error("degenerate input: {reason}")]
    Degenerate { reason: String },
    /// The concurrent t-EER path never crosses the spoof false-alarm
    /// profile, so no equalizing threshold pair exists.
    #[error("no tandem crossing: {reason}")]
    NoCrossing { reason: String },
}

/// Errors raised while fitting or applying calibration maps.
#[derive(Debug, Clone, Error)]
pub enum CalibrationError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Errors raised while joining or assembling evaluation inputs.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Join(#[from] JoinError),
}

/// Errors raised by full-report evaluation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Join(#[from] JoinError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Domain(d) => EvalError::Domain(d),
            ModelError::Join(j) => EvalError::Join(j),
        }
    }
}
