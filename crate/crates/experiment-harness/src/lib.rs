//! Runs the with/without-prompt ablation over an image manifest and emits
//! per-image and aggregate comparison tables.

mod manifest;
mod report;
mod run;

pub use manifest::{Condition, Manifest, ManifestEntry};
pub use report::{emit_report, ReportFormat};
pub use run::{cross_check_report, run_ablation, AblationRecord, AblationSummary,
    ConditionMeans, CrossCheckViolation, RecordedFailure};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("no image/condition pair completed successfully")]
    EmptyRun,

    #[error("empty summary")]
    EmptySummary,

    #[error("image error: {0}")]
    Image(#[from] image_core::ImageError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
