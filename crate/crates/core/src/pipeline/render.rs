use crate::geometry::Point;
use crate::gmm::DetectedObject;
use crate::label::{ClassLabel, LabeledPoint};
use crate::raster::RasterImage;

/// Overlay color per label; trash is not drawn.
pub fn label_color(label: ClassLabel) -> Option<[u8; 3]> {
    match label {
        ClassLabel::Cardboard => Some([0xFF, 0x00, 0x00]),
        ClassLabel::Glass => Some([0x00, 0x00, 0xFF]),
        ClassLabel::Metal => Some([0xFF, 0x80, 0x00]),
        ClassLabel::Paper => Some([0x00, 0xA0, 0x00]),
        ClassLabel::Plastic => Some([0x80, 0x00, 0x80]),
        ClassLabel::Trash => None,
    }
}

fn paint(img: &mut RasterImage, x: i64, y: i64, rgb: [u8; 3]) {
    if x >= 0 && y >= 0 && x < img.width() as i64 && y < img.height() as i64 {
        img.set_pixel(x as u32, y as u32, rgb);
    }
}

/// Draws labeled points as 3×3 dots and objects as 2σ ellipse outlines
/// with a 2-pixel stroke. Anything off-image is clipped.
pub fn render_overlay(image: &RasterImage, objects: &[DetectedObject], points: &[LabeledPoint]) -> RasterImage {
    let mut out = image.clone();
    for p in points {
        let Some(rgb) = label_color(p.label) else { continue };
        let (cx, cy) = (p.position.x.floor() as i64, p.position.y.floor() as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                paint(&mut out, cx + dx, cy + dy, rgb);
            }
        }
    }
    for o in objects {
        let Some(rgb) = label_color(o.label) else { continue };
        if !(o.ellipse.a.is_finite() && o.ellipse.b.is_finite()) {
            continue;
        }
        // Sample densely enough that consecutive samples are < 0.5 px apart.
        let steps = ((2.0 * std::f64::consts::PI * o.ellipse.a.max(1.0) / 0.5).ceil() as usize).min(1 << 20);
        for s in 0..steps {
            let t = s as f64 / steps as f64 * std::f64::consts::TAU;
            let Point { x, y } = o.ellipse.point_at(o.center, t);
            let (x0, y0) = ((x - 1.0).round() as i64, (y - 1.0).round() as i64);
            for dy in 0..2 {
                for dx in 0..2 {
                    paint(&mut out, x0 + dx, y0 + dy, rgb);
                }
            }
        }
    }
    out
}
