//! Locate and classify recyclable waste in overhead images of mixed piles.
//!
//! The pipeline slides a fixed-size window over the scene, classifies each
//! tile, keeps the confident tile centers as labeled points and fits a 2-D
//! Gaussian mixture to them. Each mixture component becomes one detected
//! object: its mean is the object position and its covariance the object
//! extent.
//!
//! The crate also carries the dataset tooling used to train the tile
//! classifier (balanced crop/flip augmentation, stratified splits) and the
//! metrics used to score detections against ground truth.

pub mod augment;
pub mod classifier;
pub mod config;
pub mod geometry;
pub mod gmm;
pub mod label;
pub mod pipeline;
pub mod raster;
pub mod rng;
pub mod scene;
pub mod tiler;

pub use config::{ConfigError, PipelineConfig};
pub use geometry::{Point, Rect};
pub use label::{ClassLabel, LabeledPoint, UnknownLabel};
pub use raster::{RasterImage, RasterError};
