use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("ConfigError({field}): {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

/// Tunables for one detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub window_w: u32,
    pub window_h: u32,
    /// Fraction of the window shared by consecutive windows, in `[0, 1)`.
    pub overlap: f64,
    /// Tiles whose top score is below this are treated as background.
    pub background_threshold: f64,
    /// Mixture components per megapixel of source image.
    pub clusters_per_megapixel: f64,
    pub em_max_iters: usize,
    pub em_tol: f64,
    pub rng_seed: u64,
    pub brightness_factor: f64,
    pub contrast_factor: f64,
    /// Components with fewer hard-assigned points are not reported.
    pub min_support: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window_w: 128,
            window_h: 128,
            overlap: 0.5,
            background_threshold: 0.5,
            clusters_per_megapixel: 20.0,
            em_max_iters: 200,
            em_tol: 1e-6,
            rng_seed: 0,
            brightness_factor: 1.0,
            contrast_factor: 1.0,
            min_support: 2,
        }
    }
}

impl PipelineConfig {
    /// Checks every field against an image of `img_w × img_h`, reporting
    /// the first violation in declaration order.
    pub fn check(&self, img_w: u32, img_h: u32) -> Result<(), ConfigError> {
        if self.window_w == 0 || self.window_w > img_w {
            return Err(ConfigError::new(
                "window_w",
                format!("window width {} must be in 1..={img_w}", self.window_w),
            ));
        }
        if self.window_h == 0 || self.window_h > img_h {
            return Err(ConfigError::new(
                "window_h",
                format!("window height {} must be in 1..={img_h}", self.window_h),
            ));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(ConfigError::new(
                "overlap",
                format!("{} is outside [0, 1)", self.overlap),
            ));
        }
        if !(0.0..=1.0).contains(&self.background_threshold) {
            return Err(ConfigError::new(
                "background_threshold",
                format!("{} is outside [0, 1]", self.background_threshold),
            ));
        }
        positive("clusters_per_megapixel", self.clusters_per_megapixel)?;
        if self.em_max_iters == 0 {
            return Err(ConfigError::new("em_max_iters", "must be at least 1"));
        }
        positive("em_tol", self.em_tol)?;
        positive("brightness_factor", self.brightness_factor)?;
        positive("contrast_factor", self.contrast_factor)?;
        if self.min_support == 0 {
            return Err(ConfigError::new("min_support", "must be at least 1"));
        }
        Ok(())
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("{v} must be a positive finite number")))
    }
}

/// Returns `cfg` unchanged when it is valid for an `img_w × img_h` image.
pub fn validate_config(
    cfg: PipelineConfig,
    img_w: u32,
    img_h: u32,
) -> Result<PipelineConfig, ConfigError> {
    cfg.check(img_w, img_h)?;
    Ok(cfg)
}
