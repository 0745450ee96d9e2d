//! Balanced dataset construction by random crop and horizontal flip, and
//! stratified train/validation/test splitting.
//!
//! Input layout is `<root>/<classname>/*.{jpg,jpeg,png}`. Output mirrors it
//! as `<out>/<classname>/NNNN.png` plus `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::label::ClassLabel;
use crate::raster::RasterImage;
use crate::rng::{derive_seed, keyed_rng};

/// Short side of the pre-crop image relative to the output extent.
pub const CROP_MARGIN: f64 = 1.125;

pub const MANIFEST_FILE: &str = "manifest.json";

const SPLIT_STREAM: u64 = 0x0073_706c_6974;

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("EmptyClassError: {0}")]
    EmptyClass(ClassLabel),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot encode {path}: {message}")]
    Encode { path: String, message: String },
    #[error("invalid options: {0}")]
    Options(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("FractionError: {0}")]
pub struct FractionError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Original,
    Augmented,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Output file, relative to the dataset root, `/`-separated.
    pub path: String,
    pub label: ClassLabel,
    pub origin: Origin,
    /// Seed of the random stream that produced this entry (the run seed
    /// for originals).
    pub seed_used: u64,
    /// Source image, relative to the source root.
    pub source: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn count(&self, label: ClassLabel) -> usize {
        self.entries.iter().filter(|e| e.label == label).count()
    }

    pub fn count_origin(&self, label: ClassLabel, origin: Origin) -> usize {
        self.entries
            .iter()
            .filter(|e| e.label == label && e.origin == origin)
            .count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AugmentError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| AugmentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| AugmentError::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentOptions {
    pub target_per_class: usize,
    pub out_w: u32,
    pub out_h: u32,
    pub seed: u64,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        Self {
            target_per_class: 600,
            out_w: 170,
            out_h: 128,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeFailure {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct AugmentReport {
    pub manifest: DatasetManifest,
    /// Unreadable inputs, skipped.
    pub decode_errors: Vec<DecodeFailure>,
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "jpg" | "jpeg" | "png"))
}

fn list_class_images(root: &Path, label: ClassLabel) -> Result<Vec<PathBuf>, AugmentError> {
    let dir = root.join(label.name());
    let Ok(read) = fs::read_dir(&dir) else {
        return Err(AugmentError::EmptyClass(label));
    };
    let mut files = Vec::new();
    for entry in read {
        let entry = entry.map_err(|source| AugmentError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let path = entry.path();
        if path.is_file() && is_image(&path) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Scale so both sides are at least `CROP_MARGIN` times the output extent.
pub fn base_size(src_w: u32, src_h: u32, out_w: u32, out_h: u32) -> (u32, u32) {
    let scale = CROP_MARGIN * (out_w as f64 / src_w as f64).max(out_h as f64 / src_h as f64);
    let w = ((src_w as f64 * scale).round() as u32).max(out_w);
    let h = ((src_h as f64 * scale).round() as u32).max(out_h);
    (w, h)
}

struct Planned {
    entry: ManifestEntry,
    base: usize,
    crop: Rect,
    flip: bool,
}

/// Builds a class-balanced dataset under `out_dir` and writes its manifest.
pub fn augment_dataset(
    source_dir: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
    opts: &AugmentOptions,
) -> Result<AugmentReport, AugmentError> {
    let (source_dir, out_dir) = (source_dir.as_ref(), out_dir.as_ref());
    if opts.target_per_class == 0 || opts.out_w == 0 || opts.out_h == 0 {
        return Err(AugmentError::Options(
            "target_per_class and output size must be positive".into(),
        ));
    }
    // Every class must be present before any output is written.
    let listings = ClassLabel::ALL
        .iter()
        .map(|&label| {
            let files = list_class_images(source_dir, label)?;
            if files.is_empty() {
                return Err(AugmentError::EmptyClass(label));
            }
            Ok((label, files))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut manifest = DatasetManifest::default();
    let mut decode_errors = Vec::new();
    for (label, files) in listings {
        let decoded: Vec<_> = files
            .par_iter()
            .map(|path| {
                let rel = relative(source_dir, path);
                RasterImage::load(path)
                    .map(|img| {
                        let (w, h) = base_size(img.width(), img.height(), opts.out_w, opts.out_h);
                        (rel.clone(), img.resize_bilinear(w, h))
                    })
                    .map_err(|e| DecodeFailure {
                        path: rel,
                        message: e.to_string(),
                    })
            })
            .collect();
        let mut bases = Vec::new();
        for d in decoded {
            match d {
                Ok(b) => bases.push(b),
                Err(e) => decode_errors.push(e),
            }
        }
        if bases.is_empty() {
            return Err(AugmentError::EmptyClass(label));
        }
        bases.truncate(opts.target_per_class);

        let plan = plan_class(label, &bases, opts);
        let class_dir = out_dir.join(label.name());
        fs::create_dir_all(&class_dir).map_err(|source| AugmentError::Io {
            path: class_dir.display().to_string(),
            source,
        })?;
        plan.par_iter()
            .map(|p| {
                let mut img = bases[p.base]
                    .1
                    .crop(p.crop)
                    .expect("crop offsets are drawn inside the base image");
                if p.flip {
                    img = img.flip_horizontal();
                }
                let path = out_dir.join(&p.entry.path);
                let bytes = img.encode_png().map_err(|e| AugmentError::Encode {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                fs::write(&path, bytes).map_err(|source| AugmentError::Io {
                    path: path.display().to_string(),
                    source,
                })
            })
            .collect::<Result<(), _>>()?;
        manifest.entries.extend(plan.into_iter().map(|p| p.entry));
    }

    let manifest_path = out_dir.join(MANIFEST_FILE);
    fs::write(&manifest_path, manifest.to_json()).map_err(|source| AugmentError::Io {
        path: manifest_path.display().to_string(),
        source,
    })?;
    Ok(AugmentReport {
        manifest,
        decode_errors,
    })
}

fn plan_class(label: ClassLabel, bases: &[(String, RasterImage)], opts: &AugmentOptions) -> Vec<Planned> {
    let (ow, oh) = (opts.out_w, opts.out_h);
    let file = |i: usize| format!("{}/{i:04}.png", label.name());
    let mut plan: Vec<Planned> = bases
        .iter()
        .enumerate()
        .map(|(i, (src, img))| Planned {
            entry: ManifestEntry {
                path: file(i),
                label,
                origin: Origin::Original,
                seed_used: opts.seed,
                source: src.clone(),
            },
            base: i,
            crop: Rect::new((img.width() - ow) / 2, (img.height() - oh) / 2, ow, oh),
            flip: false,
        })
        .collect();
    let missing = opts.target_per_class - bases.len();
    for j in 0..missing {
        let base = j % bases.len();
        let keys = [label.code() as u64, j as u64];
        let mut rng = keyed_rng(opts.seed, &keys);
        let img = &bases[base].1;
        let x = rng.random_range(0..=img.width() - ow);
        let y = rng.random_range(0..=img.height() - oh);
        let flip = rng.random_bool(0.5);
        plan.push(Planned {
            entry: ManifestEntry {
                path: file(bases.len() + j),
                label,
                origin: Origin::Augmented,
                seed_used: derive_seed(opts.seed, &keys),
                source: bases[base].0.clone(),
            },
            base,
            crop: Rect::new(x, y, ow, oh),
            flip,
        });
    }
    plan
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitManifests {
    pub train: DatasetManifest,
    pub val: DatasetManifest,
    pub test: DatasetManifest,
}

/// Per-class stratified shuffle split. Validation and test sizes are
/// floored; the remainder goes to training. Entries keep their manifest
/// order within each split.
pub fn split_manifest(
    manifest: &DatasetManifest,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<SplitManifests, FractionError> {
    let (train, val, test) = fractions;
    if [train, val, test].iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
        return Err(FractionError(format!("fractions must be non-negative, got {fractions:?}")));
    }
    if (train + val + test - 1.0).abs() > 1e-9 {
        return Err(FractionError(format!("fractions must sum to 1, got {fractions:?}")));
    }
    // Absorbs representation error such as 0.15 * 600 = 89.999….
    let share = |n: usize, f: f64| ((n as f64 * f) + 1e-9).floor() as usize;
    let mut bucket = vec![0u8; manifest.entries.len()];
    for label in ClassLabel::ALL {
        let mut idx: Vec<usize> = (0..manifest.entries.len())
            .filter(|&i| manifest.entries[i].label == label)
            .collect();
        let n = idx.len();
        let mut rng = keyed_rng(seed, &[SPLIT_STREAM, label.code() as u64]);
        idx.shuffle(&mut rng);
        let (n_val, n_test) = (share(n, val), share(n, test));
        for (pos, &i) in idx.iter().enumerate() {
            bucket[i] = if pos < n_val {
                1
            } else if pos < n_val + n_test {
                2
            } else {
                0
            };
        }
    }
    let pick = |b: u8| DatasetManifest {
        entries: manifest
            .entries
            .iter()
            .zip(&bucket)
            .filter(|(_, &k)| k == b)
            .map(|(e, _)| e.clone())
            .collect(),
    };
    Ok(SplitManifests {
        train: pick(0),
        val: pick(1),
        test: pick(2),
    })
}
