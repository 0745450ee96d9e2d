use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ClassifierError;
use crate::label::{label_from_text, ClassLabel};
use crate::raster::RasterImage;

pub const METADATA_FORMAT_VERSION: u32 = 1;

/// Sidecar describing how an exported model expects its input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelMetadata {
    pub format_version: u32,
    pub input_w: u32,
    pub input_h: u32,
    pub channel_means: [f32; 3],
    pub channel_stds: [f32; 3],
    /// Label name for each model output index.
    pub class_order: Vec<String>,
}

impl ModelMetadata {
    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let meta: Self = serde_json::from_str(text)
            .map_err(|e| ClassifierError::Metadata(format!("invalid metadata JSON: {e}")))?;
        meta.validate()?;
        Ok(meta)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClassifierError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ClassifierError::Metadata(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.format_version != METADATA_FORMAT_VERSION {
            return Err(ClassifierError::Metadata(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if self.input_w == 0 || self.input_h == 0 {
            return Err(ClassifierError::Metadata("input size must be positive".into()));
        }
        check_normalization(self)?;
        self.output_labels().map(|_| ())
    }

    /// Canonical label for each model output index.
    pub fn output_labels(&self) -> Result<[ClassLabel; ClassLabel::COUNT], ClassifierError> {
        if self.class_order.len() != ClassLabel::COUNT {
            return Err(ClassifierError::ClassOrder(format!(
                "expected {} class names, got {}",
                ClassLabel::COUNT,
                self.class_order.len()
            )));
        }
        let mut labels = [ClassLabel::Cardboard; ClassLabel::COUNT];
        let mut seen = [false; ClassLabel::COUNT];
        for (slot, name) in labels.iter_mut().zip(&self.class_order) {
            let label = label_from_text(name).map_err(|e| ClassifierError::ClassOrder(e.to_string()))?;
            if std::mem::replace(&mut seen[label.code()], true) {
                return Err(ClassifierError::ClassOrder(format!("{label} listed twice")));
            }
            *slot = label;
        }
        Ok(labels)
    }
}

fn check_normalization(meta: &ModelMetadata) -> Result<(), ClassifierError> {
    if meta.channel_stds.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(ClassifierError::Metadata(format!(
            "channel_stds must be positive, got {:?}",
            meta.channel_stds
        )));
    }
    if meta.channel_means.iter().any(|m| !m.is_finite()) {
        return Err(ClassifierError::Metadata("channel_means must be finite".into()));
    }
    Ok(())
}

/// Planar RGB float input, `3 × height × width`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTensor {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl InputTensor {
    pub fn at(&self, y: u32, x: u32, channel: usize) -> f32 {
        let plane = self.width as usize * self.height as usize;
        self.data[channel * plane + y as usize * self.width as usize + x as usize]
    }
}

/// Resizes the tile to the model input size, scales to `[0, 1]` and applies
/// per-channel normalization.
pub fn prepare_input(tile: &RasterImage, meta: &ModelMetadata) -> Result<InputTensor, ClassifierError> {
    check_normalization(meta)?;
    if meta.input_w == 0 || meta.input_h == 0 {
        return Err(ClassifierError::Metadata("input size must be positive".into()));
    }
    let (w, h) = (meta.input_w, meta.input_h);
    let resized = tile.resize_bilinear_f32(w, h);
    let plane = w as usize * h as usize;
    let mut data = vec![0.0f32; 3 * plane];
    for (i, px) in resized.chunks_exact(3).enumerate() {
        for c in 0..3 {
            data[c * plane + i] = (px[c] / 255.0 - meta.channel_means[c]) / meta.channel_stds[c];
        }
    }
    Ok(InputTensor {
        width: w,
        height: h,
        data,
    })
}
