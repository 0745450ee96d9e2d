use rayon::prelude::*;

use crate::classifier::{adjust_tone, ClassifierError, TileClassifier};
use crate::config::{ConfigError, PipelineConfig};
use crate::gmm::{choose_k, clusters_to_objects, em_fit, DetectedObject, GaussianMixture, GmmError};
use crate::label::LabeledPoint;
use crate::raster::RasterImage;
use crate::tiler::{extract_tiles, plan_grid, TilerError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Tiler(#[from] TilerError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Gmm(#[from] GmmError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub objects: Vec<DetectedObject>,
    /// Foreground tile centers in grid order.
    pub points: Vec<LabeledPoint>,
    /// `None` when every tile was background.
    pub mixture: Option<GaussianMixture>,
}

/// Runs tone adjustment, tiling, tile classification, background
/// filtering, mixture fitting and object extraction.
///
/// Tiles are classified in parallel on the current rayon pool; everything
/// downstream consumes points in grid order, so the result does not depend
/// on the thread count.
pub fn detect(
    image: &RasterImage,
    classifier: &dyn TileClassifier,
    cfg: &PipelineConfig,
) -> Result<Detection, PipelineError> {
    cfg.check(image.width(), image.height())?;
    let toned = adjust_tone(image, cfg.brightness_factor, cfg.contrast_factor);
    let grid = plan_grid(image.width(), image.height(), cfg.window_w, cfg.window_h, cfg.overlap)?;
    let tiles = extract_tiles(&toned, &grid)?;

    let scored = tiles
        .par_iter()
        .map(|t| classifier.classify(&t.tile).map(|s| (t.center, s.top())))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<LabeledPoint> = scored
        .into_iter()
        .filter(|(_, (_, score))| *score >= cfg.background_threshold)
        .map(|(center, (label, score))| LabeledPoint {
            position: center,
            label,
            confidence: score.clamp(0.0, 1.0),
        })
        .collect();

    if points.is_empty() {
        return Ok(Detection {
            objects: Vec::new(),
            points,
            mixture: None,
        });
    }
    let positions: Vec<_> = points.iter().map(|p| p.position).collect();
    let k = choose_k(image.width(), image.height(), cfg.clusters_per_megapixel, points.len());
    let mixture = em_fit(&positions, k, cfg.em_max_iters, cfg.em_tol, cfg.rng_seed)?;
    let objects = clusters_to_objects(&mixture, &points, cfg.min_support);
    Ok(Detection {
        objects,
        points,
        mixture: Some(mixture),
    })
}
