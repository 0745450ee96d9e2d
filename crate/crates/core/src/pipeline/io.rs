//! JSON documents exchanged with other tools: ground truth, detections
//! and reports.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::Detection;
use crate::geometry::Rect;
use crate::gmm::DetectedObject;
use crate::label::{ClassLabel, LabeledPoint};

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema mismatch: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthObject {
    pub label: ClassLabel,
    #[serde(rename = "box")]
    pub bbox: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneGroundTruth {
    pub image_id: String,
    #[serde(default)]
    pub objects: Vec<TruthObject>,
}

impl SceneGroundTruth {
    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let gt: Self = parse(text)?;
        if let Some(bad) = gt.objects.iter().find(|o| o.bbox.w == 0 || o.bbox.h == 0) {
            return Err(SchemaError::Invalid(format!("empty box {:?}", bad.bbox)));
        }
        Ok(gt)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SchemaError> {
        Self::from_json(&read(path.as_ref())?)
    }

    /// Fails if any box extends past a `width × height` image.
    pub fn check_bounds(&self, width: u32, height: u32) -> Result<(), SchemaError> {
        match self.objects.iter().find(|o| !o.bbox.fits_within(width, height)) {
            Some(o) => Err(SchemaError::Invalid(format!(
                "box {:?} lies outside the {width}x{height} image",
                o.bbox
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionFile {
    pub image_id: String,
    pub objects: Vec<DetectedObject>,
    pub points: Vec<LabeledPoint>,
}

impl DetectionFile {
    pub fn new(image_id: impl Into<String>, detection: &Detection) -> Self {
        Self {
            image_id: image_id.into(),
            objects: detection.objects.clone(),
            points: detection.points.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        parse(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SchemaError> {
        Self::from_json(&read(path.as_ref())?)
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError::Invalid(e.to_string()))
}

fn read(path: &Path) -> Result<String, SchemaError> {
    std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.display().to_string(),
        source,
    })
}
