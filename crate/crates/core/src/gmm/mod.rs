//! Gaussian-mixture clustering of labeled tile centers.

mod em;
mod kmeans;
pub mod linalg;
mod objects;

pub use em::{
    e_step, em_fit, em_fit_from, em_fit_traced, m_step, EmFit, GaussianComponent, GaussianMixture,
    Responsibilities, COV_FLOOR,
};
pub use kmeans::{kmeans_seed, LLOYD_MAX_ITERS};
pub use objects::{choose_k, clusters_to_objects, DetectedObject, Ellipse, ELLIPSE_SIGMAS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GmmError {
    #[error("DegenerateInput: {distinct} distinct points cannot support {k} clusters")]
    DegenerateInput { distinct: usize, k: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
