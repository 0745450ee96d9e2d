//! The `--config` JSON file: every pipeline tunable, mock-palette
//! overrides, and default model paths. Flags override file values, which
//! override built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use trashpile::classifier::Palette;
use trashpile::{ClassLabel, PipelineConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfigFile {
    pub window_w: Option<u32>,
    pub window_h: Option<u32>,
    pub overlap: Option<f64>,
    pub background_threshold: Option<f64>,
    pub clusters_per_megapixel: Option<f64>,
    pub em_max_iters: Option<usize>,
    pub em_tol: Option<f64>,
    pub rng_seed: Option<u64>,
    pub brightness_factor: Option<f64>,
    pub contrast_factor: Option<f64>,
    pub min_support: Option<usize>,
    /// Per-label RGB replacing the default mock palette entry.
    pub palette: BTreeMap<ClassLabel, [u8; 3]>,
    pub model: Option<PathBuf>,
    pub meta: Option<PathBuf>,
}

impl CliConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::schema(format!("{}: schema mismatch: {e}", path.display())))
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn pipeline(&self) -> PipelineConfig {
        let d = PipelineConfig::default();
        PipelineConfig {
            window_w: self.window_w.unwrap_or(d.window_w),
            window_h: self.window_h.unwrap_or(d.window_h),
            overlap: self.overlap.unwrap_or(d.overlap),
            background_threshold: self.background_threshold.unwrap_or(d.background_threshold),
            clusters_per_megapixel: self.clusters_per_megapixel.unwrap_or(d.clusters_per_megapixel),
            em_max_iters: self.em_max_iters.unwrap_or(d.em_max_iters),
            em_tol: self.em_tol.unwrap_or(d.em_tol),
            rng_seed: self.rng_seed.unwrap_or(d.rng_seed),
            brightness_factor: self.brightness_factor.unwrap_or(d.brightness_factor),
            contrast_factor: self.contrast_factor.unwrap_or(d.contrast_factor),
            min_support: self.min_support.unwrap_or(d.min_support),
        }
    }

    pub fn palette(&self) -> Result<Palette, CliError> {
        let mut colors = *Palette::default().colors();
        for (label, rgb) in &self.palette {
            colors[label.code()] = *rgb;
        }
        Palette::new(colors).map_err(|e| CliError::data(e.to_string()))
    }
}
