//! Synthetic scenes of solid palette-colored blobs on a plain background,
//! with matching ground truth. Used to exercise the pipeline end to end
//! with the mock classifier.

use crate::classifier::Palette;
use crate::geometry::Rect;
use crate::label::ClassLabel;
use crate::pipeline::io::{SceneGroundTruth, TruthObject};
use crate::raster::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blob {
    pub label: ClassLabel,
    pub rect: Rect,
}

impl Blob {
    pub const fn new(label: ClassLabel, x: u32, y: u32, w: u32, h: u32) -> Self {
        Self {
            label,
            rect: Rect::new(x, y, w, h),
        }
    }
}

/// Later blobs paint over earlier ones.
pub fn render_blobs(width: u32, height: u32, background: [u8; 3], blobs: &[Blob], palette: &Palette) -> RasterImage {
    let mut img = RasterImage::filled(width, height, background);
    for b in blobs {
        let rgb = palette.color(b.label);
        for y in b.rect.y..b.rect.bottom().min(height) {
            for x in b.rect.x..b.rect.right().min(width) {
                img.set_pixel(x, y, rgb);
            }
        }
    }
    img
}

pub fn ground_truth(image_id: &str, blobs: &[Blob]) -> SceneGroundTruth {
    SceneGroundTruth {
        image_id: image_id.to_string(),
        objects: blobs
            .iter()
            .map(|b| TruthObject {
                label: b.label,
                bbox: b.rect,
            })
            .collect(),
    }
}

/// The five scored classes as 192-pixel squares on a 1024×768 canvas.
/// Corners sit on multiples of 64 so that with 128-pixel windows at 0.5
/// overlap each blob fully covers four windows.
pub fn five_blob_layout() -> Vec<Blob> {
    vec![
        Blob::new(ClassLabel::Cardboard, 64, 64, 192, 192),
        Blob::new(ClassLabel::Glass, 448, 128, 192, 192),
        Blob::new(ClassLabel::Metal, 768, 64, 192, 192),
        Blob::new(ClassLabel::Paper, 192, 512, 192, 192),
        Blob::new(ClassLabel::Plastic, 640, 512, 192, 192),
    ]
}
