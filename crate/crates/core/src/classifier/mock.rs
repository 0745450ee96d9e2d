use super::{ClassScores, ClassifierError, TileClassifier};
use crate::label::ClassLabel;
use crate::raster::RasterImage;

/// Distance scale for the mock's logits, in 0–255 RGB units.
const DISTANCE_SCALE: f64 = 64.0;

/// Reference color per class, indexed by label code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette([[u8; 3]; ClassLabel::COUNT]);

impl Default for Palette {
    /// Saturated, mutually distant colors, none of them close to white.
    fn default() -> Self {
        Self([
            [170, 40, 20],  // cardboard
            [20, 60, 200],  // glass
            [40, 40, 40],   // metal
            [30, 160, 40],  // paper
            [150, 30, 170], // plastic
            [200, 190, 30], // trash
        ])
    }
}

impl Palette {
    pub fn new(colors: [[u8; 3]; ClassLabel::COUNT]) -> Result<Self, ClassifierError> {
        for i in 0..ClassLabel::COUNT {
            for j in i + 1..ClassLabel::COUNT {
                if colors[i] == colors[j] {
                    return Err(ClassifierError::Palette(format!(
                        "{} and {} share color {:?}",
                        ClassLabel::ALL[i],
                        ClassLabel::ALL[j],
                        colors[i]
                    )));
                }
            }
        }
        Ok(Self(colors))
    }

    pub fn color(&self, label: ClassLabel) -> [u8; 3] {
        self.0[label.code()]
    }

    pub fn colors(&self) -> &[[u8; 3]; ClassLabel::COUNT] {
        &self.0
    }

    /// Copy with one class recolored; fails if that creates a duplicate.
    pub fn with_color(&self, label: ClassLabel, rgb: [u8; 3]) -> Result<Self, ClassifierError> {
        let mut colors = self.0;
        colors[label.code()] = rgb;
        Self::new(colors)
    }
}

/// Softmax over negative scaled distances from the tile's mean color to
/// each palette color.
pub fn mock_classify(tile: &RasterImage, palette: &Palette) -> Result<ClassScores, ClassifierError> {
    let checked = Palette::new(palette.0)?;
    Ok(scores_for_mean(tile.mean_rgb(), &checked))
}

fn scores_for_mean(mean: [f64; 3], palette: &Palette) -> ClassScores {
    let logits = palette.0.map(|c| {
        let d2: f64 = (0..3).map(|i| (mean[i] - c[i] as f64).powi(2)).sum();
        -d2.sqrt() / DISTANCE_SCALE
    });
    ClassScores::softmax(logits)
}

/// Deterministic stand-in for a trained model, keyed on tile color.
#[derive(Debug, Clone, Default)]
pub struct MockClassifier {
    palette: Palette,
}

impl MockClassifier {
    pub fn new(palette: Palette) -> Result<Self, ClassifierError> {
        Ok(Self {
            palette: Palette::new(palette.0)?,
        })
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }
}

impl TileClassifier for MockClassifier {
    fn classify(&self, tile: &RasterImage) -> Result<ClassScores, ClassifierError> {
        Ok(scores_for_mean(tile.mean_rgb(), &self.palette))
    }
}
