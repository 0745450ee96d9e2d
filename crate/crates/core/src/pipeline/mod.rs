//! End-to-end detection plus scoring, rendering and file formats.

mod detect;
pub mod io;
mod metrics;
mod render;

pub use detect::{detect, Detection, PipelineError};
pub use metrics::{
    confusion_matrix, match_and_score, ConfusionMatrix, DetectionReport, ReportRow, SCORED_LABELS,
};
pub use render::{label_color, render_overlay};
