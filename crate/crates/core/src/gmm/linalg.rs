//! Closed-form algebra on symmetric 2×2 matrices.

use serde::{Deserialize, Serialize};

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

/// Eigenvalues in descending order plus the angle of the major axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub major: f64,
    pub minor: f64,
    /// Angle of the major eigenvector from +x, radians in `(-π/2, π/2]`.
    pub angle: f64,
}

impl SymMat2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub const fn diag(v: f64) -> Self {
        Self::new(v, 0.0, v)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        (det > 0.0 && det.is_finite()).then(|| Self::new(self.yy / det, -self.xy / det, self.xx / det))
    }

    /// `vᵀ M v` for `v = (dx, dy)`.
    pub fn quad_form(&self, dx: f64, dy: f64) -> f64 {
        self.xx * dx * dx + 2.0 * self.xy * dx * dy + self.yy * dy * dy
    }

    pub fn eigen(&self) -> Eigen2 {
        let half_trace = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let radius = half_diff.hypot(self.xy);
        Eigen2 {
            major: half_trace + radius,
            minor: half_trace - radius,
            angle: 0.5 * (2.0 * self.xy).atan2(self.xx - self.yy),
        }
    }

    pub fn from_eigen(e: Eigen2) -> Self {
        let (s, c) = e.angle.sin_cos();
        Self::new(
            e.major * c * c + e.minor * s * s,
            (e.major - e.minor) * c * s,
            e.major * s * s + e.minor * c * c,
        )
    }

    /// Raises every eigenvalue below `floor` to `floor`, keeping eigenvectors.
    pub fn floor_eigenvalues(&self, floor: f64) -> Self {
        let e = self.eigen();
        if e.minor >= floor {
            return *self;
        }
        Self::from_eigen(Eigen2 {
            major: e.major.max(floor),
            minor: floor,
            angle: e.angle,
        })
    }
}
