//! Sliding-window decomposition of a scene into fixed-size tiles.

use serde::{Deserialize, Serialize};

use crate::config::ConfigError;
use crate::geometry::{Point, Rect};
use crate::raster::RasterImage;

#[derive(Debug, thiserror::Error)]
pub enum TilerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("DimensionMismatch: grid planned for {grid_w}x{grid_h}, image is {image_w}x{image_h}")]
    DimensionMismatch {
        grid_w: u32,
        grid_h: u32,
        image_w: u32,
        image_h: u32,
    },
}

/// Window regions covering a source image, in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileGrid {
    pub regions: Vec<Rect>,
    pub source_w: u32,
    pub source_h: u32,
    pub window_w: u32,
    pub window_h: u32,
    pub step_x: u32,
    pub step_y: u32,
}

/// A tile cut from the source together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TilePlacement {
    pub tile: RasterImage,
    pub region: Rect,
    pub center: Point,
}

impl TileGrid {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

/// Step length for a window extent and overlap fraction, never below one pixel.
pub fn step_for(window: u32, overlap: f64) -> u32 {
    ((window as f64 * (1.0 - overlap)).round() as u32).max(1)
}

/// Window offsets along one axis: `0, step, 2·step, …` while the window
/// fits, plus one extra window flush with the far edge if the regular
/// positions leave the tail uncovered.
fn axis_positions(extent: u32, window: u32, step: u32) -> Vec<u32> {
    let last = extent - window;
    let mut out: Vec<u32> = (0..=last).step_by(step as usize).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

pub fn plan_grid(
    source_w: u32,
    source_h: u32,
    window_w: u32,
    window_h: u32,
    overlap: f64,
) -> Result<TileGrid, ConfigError> {
    if window_w == 0 || window_w > source_w {
        return Err(ConfigError::new(
            "window_w",
            format!("window width {window_w} must be in 1..={source_w}"),
        ));
    }
    if window_h == 0 || window_h > source_h {
        return Err(ConfigError::new(
            "window_h",
            format!("window height {window_h} must be in 1..={source_h}"),
        ));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(ConfigError::new("overlap", format!("{overlap} is outside [0, 1)")));
    }
    let step_x = step_for(window_w, overlap);
    let step_y = step_for(window_h, overlap);
    let xs = axis_positions(source_w, window_w, step_x);
    let ys = axis_positions(source_h, window_h, step_y);
    let regions = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Rect::new(x, y, window_w, window_h)))
        .collect();
    Ok(TileGrid {
        regions,
        source_w,
        source_h,
        window_w,
        window_h,
        step_x,
        step_y,
    })
}

pub fn extract_tiles(image: &RasterImage, grid: &TileGrid) -> Result<Vec<TilePlacement>, TilerError> {
    if image.dimensions() != (grid.source_w, grid.source_h) {
        return Err(TilerError::DimensionMismatch {
            grid_w: grid.source_w,
            grid_h: grid.source_h,
            image_w: image.width(),
            image_h: image.height(),
        });
    }
    grid.regions
        .iter()
        .map(|&region| {
            let tile = image
                .crop(region)
                .expect("planned regions lie inside the source");
            Ok(TilePlacement {
                tile,
                region,
                center: region.center(),
            })
        })
        .collect()
}
