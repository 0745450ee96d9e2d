//! Tile classification: the classifier contract, input preprocessing, a
//! color-distance mock and the adapter for exported ONNX models.

mod exported;
mod metadata;
mod mock;
mod tone;

pub use exported::{load_exported_model, ExportedModelClassifier};
pub use metadata::{prepare_input, InputTensor, ModelMetadata};
pub use mock::{mock_classify, MockClassifier, Palette};
pub use tone::adjust_tone;

use crate::label::ClassLabel;

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("ModelLoadError: {0}")]
    ModelLoad(String),
    #[error("MetadataError: {0}")]
    Metadata(String),
    #[error("ClassOrderError: {0}")]
    ClassOrder(String),
    #[error("PaletteError: {0}")]
    Palette(String),
    #[error("InferenceError: {0}")]
    Inference(String),
}

/// Probability for each class, indexed by [`ClassLabel::code`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores([f64; ClassLabel::COUNT]);

impl ClassScores {
    /// Numerically stable softmax over per-class logits.
    pub fn softmax(logits: [f64; ClassLabel::COUNT]) -> Self {
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp = logits.map(|l| (l - max).exp());
        let sum: f64 = exp.iter().sum();
        Self(exp.map(|e| e / sum))
    }

    /// Accepts a probability vector that is non-negative and sums to one
    /// within 1e-6.
    pub fn from_probs(probs: [f64; ClassLabel::COUNT]) -> Option<Self> {
        let sum: f64 = probs.iter().sum();
        let ok = probs.iter().all(|p| (0.0..=1.0).contains(p)) && (sum - 1.0).abs() <= 1e-6;
        ok.then_some(Self(probs))
    }

    pub fn probs(&self) -> &[f64; ClassLabel::COUNT] {
        &self.0
    }

    pub fn get(&self, label: ClassLabel) -> f64 {
        self.0[label.code()]
    }

    /// Highest-scoring label and its score; ties go to the lower code.
    pub fn top(&self) -> (ClassLabel, f64) {
        let mut best = 0;
        for i in 1..ClassLabel::COUNT {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        (ClassLabel::ALL[best], self.0[best])
    }
}

/// Anything that maps a tile to class probabilities.
///
/// Implementations must be pure functions of the tile pixels and callable
/// from many threads at once.
pub trait TileClassifier: Send + Sync {
    fn classify(&self, tile: &crate::RasterImage) -> Result<ClassScores, ClassifierError>;
}
