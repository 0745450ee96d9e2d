use std::path::Path;
use std::sync::Arc;

use tract_onnx::prelude::*;

use super::{prepare_input, ClassScores, ClassifierError, ModelMetadata, TileClassifier};
use crate::label::ClassLabel;
use crate::raster::RasterImage;

type Plan = Arc<TypedSimplePlan>;

/// Runs an ONNX classifier taking a `1×3×H×W` float tensor and producing
/// `1×6` logits.
///
/// The optimized plan is immutable; every call gets its own execution
/// state, so one instance can serve many threads.
#[derive(Debug, Clone)]
pub struct ExportedModelClassifier {
    plan: Plan,
    meta: ModelMetadata,
    output_labels: [ClassLabel; ClassLabel::COUNT],
}

pub fn load_exported_model(
    model_path: impl AsRef<Path>,
    meta_path: impl AsRef<Path>,
) -> Result<ExportedModelClassifier, ClassifierError> {
    let meta = ModelMetadata::load(meta_path)?;
    let model_path = model_path.as_ref();
    let bytes = std::fs::read(model_path)
        .map_err(|e| ClassifierError::ModelLoad(format!("{}: {e}", model_path.display())))?;
    ExportedModelClassifier::from_bytes(&bytes, meta)
}

impl ExportedModelClassifier {
    pub fn from_bytes(model: &[u8], meta: ModelMetadata) -> Result<Self, ClassifierError> {
        let output_labels = meta.output_labels()?;
        meta.validate()?;
        let load = |e: TractError| ClassifierError::ModelLoad(format!("{e:#}"));
        let shape = [1, 3, meta.input_h as usize, meta.input_w as usize];
        let plan = tract_onnx::onnx()
            .model_for_read(&mut std::io::Cursor::new(model))
            .map_err(load)?
            .with_input_fact(0, f32::fact(shape).into())
            .map_err(load)?
            .into_optimized()
            .map_err(load)?
            .into_runnable()
            .map_err(load)?;
        let classifier = Self {
            plan,
            meta,
            output_labels,
        };
        // Reject models whose output is not six logits before any real tile
        // reaches them.
        let probe = Tensor::zero::<f32>(&shape).map_err(load)?;
        classifier
            .logits(probe)
            .map_err(|e| ClassifierError::ModelLoad(e.to_string()))?;
        Ok(classifier)
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.meta
    }

    fn logits(&self, input: Tensor) -> Result<[f64; ClassLabel::COUNT], ClassifierError> {
        let infer = |e: TractError| ClassifierError::Inference(format!("{e:#}"));
        let outputs = self.plan.run(tvec!(input.into())).map_err(infer)?;
        let out = outputs
            .first()
            .ok_or_else(|| ClassifierError::Inference("model produced no outputs".into()))?;
        let view = out.to_plain_array_view::<f32>().map_err(infer)?;
        if view.len() != ClassLabel::COUNT {
            return Err(ClassifierError::Inference(format!(
                "expected {} logits, model produced shape {:?}",
                ClassLabel::COUNT,
                view.shape()
            )));
        }
        let mut logits = [0.0; ClassLabel::COUNT];
        for (slot, v) in logits.iter_mut().zip(view.iter()) {
            *slot = *v as f64;
        }
        Ok(logits)
    }
}

impl TileClassifier for ExportedModelClassifier {
    fn classify(&self, tile: &RasterImage) -> Result<ClassScores, ClassifierError> {
        let input = prepare_input(tile, &self.meta)?;
        let shape = [1, 3, input.height as usize, input.width as usize];
        let tensor = Tensor::from_shape(&shape, &input.data)
            .map_err(|e| ClassifierError::Inference(format!("{e:#}")))?;
        let raw = self.logits(tensor)?;
        // Model output order -> canonical code order.
        let mut logits = [0.0; ClassLabel::COUNT];
        for (value, label) in raw.iter().zip(self.output_labels) {
            logits[label.code()] = *value;
        }
        Ok(ClassScores::softmax(logits))
    }
}
