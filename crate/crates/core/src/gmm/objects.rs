//! Turning fitted components into located, sized, labeled objects.

use serde::{Deserialize, Serialize};

use super::linalg::SymMat2;
use super::GaussianMixture;
use crate::geometry::Point;
use crate::label::ClassLabel;
use crate::label::LabeledPoint;

/// Object extent is drawn at this many standard deviations.
pub const ELLIPSE_SIGMAS: f64 = 2.0;

/// Number of mixture components for an image: a density per megapixel,
/// clamped to `1..=n_points`.
pub fn choose_k(image_w: u32, image_h: u32, clusters_per_megapixel: f64, n_points: usize) -> usize {
    let megapixels = image_w as f64 * image_h as f64 / 1e6;
    let k = (megapixels * clusters_per_megapixel).round();
    let k = if k.is_finite() && k > 0.0 { k as usize } else { 1 };
    k.clamp(1, n_points.max(1))
}

/// Semi-axes (`a ≥ b`) and orientation of the major axis, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

impl Ellipse {
    pub fn from_covariance(cov: &SymMat2, sigmas: f64) -> Self {
        let e = cov.eigen();
        Self {
            a: sigmas * e.major.max(0.0).sqrt(),
            b: sigmas * e.minor.max(0.0).sqrt(),
            theta: e.angle,
        }
    }

    /// Point on the outline at parameter `t`.
    pub fn point_at(&self, center: Point, t: f64) -> Point {
        let (st, ct) = t.sin_cos();
        let (s, c) = self.theta.sin_cos();
        let (u, v) = (self.a * ct, self.b * st);
        Point::new(center.x + u * c - v * s, center.y + u * s + v * c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedObject {
    pub label: ClassLabel,
    pub center: Point,
    pub ellipse: Ellipse,
    pub support: usize,
    pub mean_confidence: f64,
}

/// Hard-assigns points to components and emits one object per component
/// with at least `min_support` members.
///
/// The label is the confidence-weighted majority of the members, ties
/// going to the lower class code. Trash objects are kept.
pub fn clusters_to_objects(
    mixture: &GaussianMixture,
    points: &[LabeledPoint],
    min_support: usize,
) -> Vec<DetectedObject> {
    let k = mixture.k();
    let mut votes = vec![[0.0f64; ClassLabel::COUNT]; k];
    let mut support = vec![0usize; k];
    let mut confidence = vec![0.0f64; k];
    for p in points {
        let j = mixture.assign(p.position);
        votes[j][p.label.code()] += p.confidence;
        support[j] += 1;
        confidence[j] += p.confidence;
    }
    mixture
        .components
        .iter()
        .enumerate()
        .filter(|&(j, _)| support[j] >= min_support.max(1))
        .map(|(j, c)| {
            let mut best = 0;
            for code in 1..ClassLabel::COUNT {
                if votes[j][code] > votes[j][best] {
                    best = code;
                }
            }
            DetectedObject {
                label: ClassLabel::ALL[best],
                center: c.mean,
                ellipse: Ellipse::from_covariance(&c.cov, ELLIPSE_SIGMAS),
                support: support[j],
                mean_confidence: confidence[j] / support[j] as f64,
            }
        })
        .collect()
}
