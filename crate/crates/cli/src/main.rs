//! `trashpile` command-line front end.
//!
//! Exit status: 0 success, 1 output I/O failure, 2 bad data or
//! configuration, 3 model load or inference failure, 4 unreadable image,
//! 5 schema mismatch in a JSON input.

mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trashpile::augment::{augment_dataset, split_manifest, AugmentOptions, Origin, MANIFEST_FILE};
use trashpile::classifier::{load_exported_model, MockClassifier, TileClassifier};
use trashpile::pipeline::io::{to_pretty, DetectionFile, SceneGroundTruth};
use trashpile::pipeline::{detect, match_and_score, render_overlay, PipelineError};
use trashpile::{ClassLabel, PipelineConfig, RasterImage};

use config::CliConfigFile;
use error::CliError;

#[derive(Parser)]
#[command(name = "trashpile", version, about = "Detect and localize waste objects in images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Balance a class-per-folder dataset to a fixed count per class.
    Augment(AugmentArgs),
    /// Detect objects in one image.
    Detect(DetectArgs),
    /// Score detections against ground truth.
    Eval(EvalArgs),
    /// Draw saved detections over an image.
    Render(RenderArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; its values sit between built-in defaults and flags.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed; overrides `rng_seed` from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Args)]
struct ClassifierArgs {
    /// Exported ONNX classifier; overrides `model` from the config file.
    #[arg(long, value_name = "PATH", requires = "meta", conflicts_with = "mock")]
    model: Option<PathBuf>,
    /// Metadata JSON that accompanies the model.
    #[arg(long, value_name = "PATH", requires = "model")]
    meta: Option<PathBuf>,
    /// Use the nearest-palette-color classifier instead of a model.
    #[arg(long)]
    mock: bool,
}

#[derive(Args)]
struct AugmentArgs {
    /// Directory with one sub-folder per class (cardboard, glass, ...).
    source: PathBuf,
    /// Output directory for resized images and manifest.json.
    out: PathBuf,
    /// Images per class after augmentation.
    #[arg(long, default_value_t = 600)]
    target_per_class: usize,
    /// Output image width.
    #[arg(long, default_value_t = 170)]
    width: u32,
    /// Output image height.
    #[arg(long, default_value_t = 128)]
    height: u32,
    /// Also write train/val/test manifests, e.g. `0.8,0.1,0.1`.
    #[arg(long, value_name = "TRAIN,VAL,TEST", value_delimiter = ',')]
    split: Option<Vec<f64>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DetectArgs {
    /// Image to analyse (PNG or JPEG).
    image: PathBuf,
    #[command(flatten)]
    classifier: ClassifierArgs,
    /// Where to write the detection JSON (default: stdout).
    #[arg(long, value_name = "PATH")]
    out_json: Option<PathBuf>,
    /// Where to write an overlay PNG.
    #[arg(long, value_name = "PATH")]
    out_png: Option<PathBuf>,
    /// Identifier stored in the JSON (default: image file stem).
    #[arg(long)]
    image_id: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth JSON.
    #[arg(long, value_name = "PATH")]
    truth: PathBuf,
    /// Saved detection JSON to score.
    #[arg(long, value_name = "PATH", conflicts_with = "image", required_unless_present = "image")]
    detections: Option<PathBuf>,
    /// Image to run detection on before scoring.
    #[arg(long, value_name = "PATH")]
    image: Option<PathBuf>,
    #[command(flatten)]
    classifier: ClassifierArgs,
    /// Where to write the report JSON.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RenderArgs {
    /// Image the detections were computed on.
    image: PathBuf,
    /// Detection JSON as written by `detect`.
    #[arg(long, value_name = "PATH")]
    detections: PathBuf,
    /// Output PNG.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    let common = match &command {
        Command::Augment(a) => &a.common,
        Command::Detect(a) => &a.common,
        Command::Eval(a) => &a.common,
        Command::Render(a) => &a.common,
    };
    let file = CliConfigFile::load_opt(common.config.as_deref())?;
    let mut pipeline = file.pipeline();
    if let Some(seed) = common.seed {
        pipeline.rng_seed = seed;
    }
    let threads = common.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::data(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| match command {
        Command::Augment(a) => cmd_augment(a, pipeline.rng_seed),
        Command::Detect(a) => cmd_detect(a, &file, &pipeline),
        Command::Eval(a) => cmd_eval(a, &file, &pipeline),
        Command::Render(a) => cmd_render(a),
    })
}

fn cmd_augment(args: AugmentArgs, seed: u64) -> Result<(), CliError> {
    let opts = AugmentOptions {
        target_per_class: args.target_per_class,
        out_w: args.width,
        out_h: args.height,
        seed,
    };
    let report = augment_dataset(&args.source, &args.out, &opts).map_err(|e| CliError::data(e.to_string()))?;
    for f in &report.decode_errors {
        eprintln!("skipped {}: {}", f.path, f.message);
    }
    let m = &report.manifest;
    for label in ClassLabel::ALL {
        println!(
            "{:<10} {:>5} ({} original, {} augmented)",
            label.name(),
            m.count(label),
            m.count_origin(label, Origin::Original),
            m.count_origin(label, Origin::Augmented)
        );
    }
    println!("{:<10} {:>5}", "total", m.len());
    if let Some(f) = args.split {
        let [train, val, test] = f[..] else {
            return Err(CliError::data(format!("--split takes three fractions, got {}", f.len())));
        };
        let splits = split_manifest(m, (train, val, test), seed).map_err(|e| CliError::data(e.to_string()))?;
        for (name, part) in [("train", &splits.train), ("val", &splits.val), ("test", &splits.test)] {
            write_text(&args.out.join(format!("{name}.json")), &part.to_json())?;
            println!("{name}: {}", part.len());
        }
    }
    println!("manifest: {}", args.out.join(MANIFEST_FILE).display());
    Ok(())
}

fn cmd_detect(args: DetectArgs, file: &CliConfigFile, cfg: &PipelineConfig) -> Result<(), CliError> {
    let image = load_image(&args.image)?;
    let image_id = args.image_id.unwrap_or_else(|| stem(&args.image));
    let detection = run_detect(&image, &args.classifier, file, cfg)?;
    let out = DetectionFile::new(image_id, &detection);
    match &args.out_json {
        Some(path) => write_text(path, &out.to_json())?,
        None => print!("{}", out.to_json()),
    }
    if let Some(path) = &args.out_png {
        write_png(path, &render_overlay(&image, &out.objects, &out.points))?;
    }
    eprintln!("{} foreground tiles, {} objects", out.points.len(), out.objects.len());
    Ok(())
}

fn cmd_eval(args: EvalArgs, file: &CliConfigFile, cfg: &PipelineConfig) -> Result<(), CliError> {
    let truth = SceneGroundTruth::load(&args.truth).map_err(|e| CliError::schema(e.to_string()))?;
    let objects = match (&args.detections, &args.image) {
        (Some(path), _) => {
            let saved = DetectionFile::load(path).map_err(|e| CliError::schema(e.to_string()))?;
            if saved.image_id != truth.image_id {
                eprintln!(
                    "warning: detections are for {:?}, truth is for {:?}",
                    saved.image_id, truth.image_id
                );
            }
            saved.objects
        }
        (None, Some(path)) => {
            let image = load_image(path)?;
            truth
                .check_bounds(image.width(), image.height())
                .map_err(|e| CliError::schema(e.to_string()))?;
            run_detect(&image, &args.classifier, file, cfg)?.objects
        }
        (None, None) => unreachable!("clap requires --detections or --image"),
    };
    let report = match_and_score(&objects, &truth);
    print!("{}", report.to_table());
    if let Some(path) = &args.out {
        write_text(path, &to_pretty(&report))?;
    }
    Ok(())
}

fn cmd_render(args: RenderArgs) -> Result<(), CliError> {
    let image = load_image(&args.image)?;
    let saved = DetectionFile::load(&args.detections).map_err(|e| CliError::schema(e.to_string()))?;
    write_png(&args.out, &render_overlay(&image, &saved.objects, &saved.points))
}

fn run_detect(
    image: &RasterImage,
    args: &ClassifierArgs,
    file: &CliConfigFile,
    cfg: &PipelineConfig,
) -> Result<trashpile::pipeline::Detection, CliError> {
    let classifier = build_classifier(args, file)?;
    detect(image, classifier.as_ref(), cfg).map_err(|e| match e {
        PipelineError::Classifier(e) => CliError::model(e.to_string()),
        e => CliError::data(e.to_string()),
    })
}

fn build_classifier(args: &ClassifierArgs, file: &CliConfigFile) -> Result<Box<dyn TileClassifier>, CliError> {
    if args.mock {
        return Ok(Box::new(
            MockClassifier::new(file.palette()?).map_err(|e| CliError::data(e.to_string()))?,
        ));
    }
    let model = args.model.as_ref().or(file.model.as_ref());
    let meta = args.meta.as_ref().or(file.meta.as_ref());
    match (model, meta) {
        (Some(model), Some(meta)) => Ok(Box::new(
            load_exported_model(model, meta).map_err(|e| CliError::model(e.to_string()))?,
        )),
        _ => Err(CliError::data(
            "no classifier: pass --model and --meta, set both in the config file, or use --mock",
        )),
    }
}

fn load_image(path: &Path) -> Result<RasterImage, CliError> {
    RasterImage::load(path).map_err(|e| CliError::image(e.to_string()))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write_png(path: &Path, image: &RasterImage) -> Result<(), CliError> {
    let bytes = image.encode_png().map_err(|e| CliError::io(e.to_string()))?;
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}
