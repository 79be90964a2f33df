//! Command-line entry point.
//!
//! Exit status: 0 on success, 1 for usage errors (bad or unknown flags), 2
//! when reading, processing or writing data fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use srbin_core::metrics::metric_suite;
use srbin_core::montage::render_montage;
use srbin_core::protocol::Branch;
use srbin_core::raster::{mask_from_raster, raster_from_mask, to_grayscale, GT_THRESHOLD};
use srbin_core::resample::{downscale_half, upscale};
use srbin_core::stages::binarize;
use srbin_core::synth::synthesize_document;
use srbin_core::{BinaryMask, Error as CoreError, KernelKind};

use crate::error::{Result, SrbinError};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentReport};
use crate::image_io::{load_image, save_image};
use crate::manifest::{scan_dataset, Manifest};
use crate::report::{render_metrics, render_report, Format};
use crate::stages::{SegSpec, SrSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "srbin",
    version,
    about = "Super-resolution pre-processing for document binarization: stages, metrics and experiments",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Halve an image with a 2x2 box filter.
    Downscale {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enlarge an image by an integer factor.
    Upscale {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        scale: u32,
        #[arg(long, value_parser = ["nearest", "bilinear", "bicubic", "lanczos3"], default_value = "bicubic")]
        kernel: String,
    },
    /// Binarize an image; writes black text on white.
    Binarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = ["otsu", "niblack", "sauvola", "external"])]
        method: String,
        #[command(flatten)]
        params: SegParams,
        /// Directory of external segmentation outputs (`--method external`).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Compare a predicted binary image with its ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Pair inputs with ground truths in a directory and write a manifest.
    Scan {
        #[arg(long)]
        dir: PathBuf,
        /// Ground-truth stem suffix, case-insensitive [default: _GT]
        #[arg(long)]
        gt_suffix: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write synthetic documents and ground truths (`doc_NNN.png`, `doc_NNN_GT.png`).
    Synth {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        w: u32,
        #[arg(long)]
        h: u32,
        /// Number of documents; document i uses seed + i.
        #[arg(long)]
        count: u32,
        #[arg(long)]
        noise: f64,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        /// Strokes drawn per document.
        #[arg(long, default_value_t = 120)]
        strokes: u32,
    },
    /// Run the with/without SR comparison over a manifest.
    Experiment {
        #[arg(long)]
        manifest: PathBuf,
        /// identity | nearest | bilinear | bicubic | lanczos3 | external:DIR
        #[arg(long)]
        sr: String,
        /// otsu | niblack | sauvola | external:DIR
        #[arg(long)]
        seg: String,
        #[command(flatten)]
        params: SegParams,
        /// Comma-separated subset of with,without.
        #[arg(long, default_value = "with,without")]
        branches: String,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (results do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Render a saved experiment report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
    /// Side-by-side panel: input, ground truth, with-SR and without-SR outputs.
    Montage {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long = "with-sr")]
        with_sr: PathBuf,
        #[arg(long = "without-sr")]
        without_sr: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SegParams {
    /// Local window size (odd) [default: 25]
    #[arg(long)]
    window: Option<u32>,
    /// Niblack/Sauvola k [default: -0.2 / 0.2]
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Sauvola dynamic range R [default: 128]
    #[arg(long)]
    r: Option<f64>,
}

/// Errors split by exit status.
enum Failure {
    Usage(String),
    Data(SrbinError),
}

impl From<SrbinError> for Failure {
    fn from(e: SrbinError) -> Self {
        Failure::Data(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Data(e.into())
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .unwrap_or_default()
        .to_string_lossy()
        .into_owned()
}

fn load_mask(path: &Path) -> Result<BinaryMask> {
    Ok(mask_from_raster(
        &to_grayscale(&load_image(path)?),
        GT_THRESHOLD,
    )?)
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| SrbinError::io("<stdout>", e))
}

fn parse_branches(s: &str) -> std::result::Result<Vec<Branch>, Failure> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let b = match part {
            "with" | "with_sr" => Branch::WithSr,
            "without" | "without_sr" => Branch::WithoutSr,
            other => return Err(Failure::Usage(format!("unknown branch '{other}'"))),
        };
        if !out.contains(&b) {
            out.push(b);
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage(
            "--branches must name at least one branch".into(),
        ));
    }
    Ok(out)
}

/// Configuration problems found while interpreting flags are usage errors.
fn usage_on_config(e: SrbinError) -> Failure {
    match e {
        SrbinError::ConfigInvalid(msg) => Failure::Usage(msg),
        SrbinError::Core(c @ (CoreError::EvenWindow(_) | CoreError::InvalidParameter(_))) => {
            Failure::Usage(c.to_string())
        }
        other => Failure::Data(other),
    }
}

fn execute(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Downscale { input, out } => {
            let img = load_image(&input)?;
            save_image(&downscale_half(&img)?, &out)?;
        }
        Command::Upscale {
            input,
            out,
            scale,
            kernel,
        } => {
            if scale == 0 {
                return Err(Failure::Usage("--scale must be at least 1".into()));
            }
            let kernel: KernelKind = kernel.parse()?;
            let img = load_image(&input)?;
            save_image(&upscale(&img, scale, kernel)?, &out)?;
        }
        Command::Binarize {
            input,
            out,
            method,
            params,
            dir,
        } => {
            let spec =
                SegSpec::from_parts(&method, params.window, params.k, params.r, dir.as_deref())
                    .map_err(usage_on_config)?;
            let img = load_image(&input)?;
            let mask = binarize(&img, &spec, &stem_of(&input))?;
            save_image(&raster_from_mask(&mask), &out)?;
        }
        Command::Eval { pred, gt, format } => {
            let p = load_mask(&pred)?;
            let g = load_mask(&gt)?;
            let m = metric_suite(&p, &g).map_err(|e| match e {
                CoreError::SizeMismatch { left, right } => {
                    SrbinError::Core(CoreError::Stage(format!(
                        "size mismatch: prediction {} is {}x{}, ground truth {} is {}x{}",
                        pred.display(),
                        left.0,
                        left.1,
                        gt.display(),
                        right.0,
                        right.1
                    )))
                }
                other => other.into(),
            })?;
            print(&render_metrics(&m, format)?)?;
        }
        Command::Scan {
            dir,
            gt_suffix,
            out,
        } => {
            let scan = scan_dataset(&dir, gt_suffix.as_deref())?;
            for note in &scan.unpaired {
                eprintln!("warning: {note}");
            }
            scan.manifest.save(&out)?;
            eprintln!(
                "{} pairs written to {}",
                scan.manifest.entries.len(),
                out.display()
            );
        }
        Command::Synth {
            seed,
            w,
            h,
            count,
            noise,
            out_dir,
            strokes,
        } => {
            if !out_dir.is_dir() {
                std::fs::create_dir_all(&out_dir).map_err(|e| SrbinError::io(&out_dir, e))?;
            }
            for i in 0..count {
                let doc = synthesize_document(seed.wrapping_add(i as u64), w, h, noise, strokes)?;
                save_image(&doc.input, &out_dir.join(format!("doc_{i:03}.png")))?;
                save_image(
                    &raster_from_mask(&doc.gt),
                    &out_dir.join(format!("doc_{i:03}_GT.png")),
                )?;
            }
        }
        Command::Experiment {
            manifest,
            sr,
            seg,
            params,
            branches,
            out,
            threads,
        } => {
            let branches = parse_branches(&branches)?;
            let sr = SrSpec::parse(&sr).map_err(usage_on_config)?;
            let seg = SegSpec::from_parts(&seg, params.window, params.k, params.r, None)
                .map_err(usage_on_config)?;
            let cfg = ExperimentConfig {
                sr,
                seg,
                branches,
                threads,
            };
            cfg.validate().map_err(usage_on_config)?;
            let manifest = Manifest::load(&manifest)?;
            let report = run_experiment(&manifest, &cfg)?;
            for (id, entry) in &report.per_image {
                for err in entry.errors.values() {
                    eprintln!("warning: {id}: {err}");
                }
            }
            report.save(&out)?;
        }
        Command::Report { input, format } => {
            let report = ExperimentReport::load(&input)?;
            print(&render_report(&report, format)?)?;
        }
        Command::Montage {
            input,
            gt,
            with_sr,
            without_sr,
            out,
        } => {
            let img = load_image(&input)?;
            let panel = render_montage(
                &img,
                &load_mask(&gt)?,
                &load_mask(&with_sr)?,
                &load_mask(&without_sr)?,
            )?;
            save_image(&panel, &out)?;
        }
    }
    Ok(())
}
