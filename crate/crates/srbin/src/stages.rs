//! Stage specifications, including adapters that read the outputs of
//! externally run models (one `<stem>.png` per document in a flat directory).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use srbin_core::raster::{mask_from_raster, to_grayscale, GT_THRESHOLD};
use srbin_core::stages::{
    Binarizer, ClassicalSeg, ClassicalSr, SuperResolver, DEFAULT_NIBLACK_K, DEFAULT_SAUVOLA_K,
    DEFAULT_SAUVOLA_R, DEFAULT_WINDOW,
};
use srbin_core::{BinaryMask, Error as CoreError, KernelKind, Raster};

use crate::error::{Result, SrbinError};
use crate::image_io::load_image;

/// Loads `<dir>/<stem>.png`, checks its size and converts it to grayscale.
pub fn load_external_output(
    dir: &Path,
    stem: &str,
    expected_w: u32,
    expected_h: u32,
) -> Result<Raster, CoreError> {
    let path = dir.join(format!("{stem}.png"));
    let display = path.display().to_string();
    if !path.is_file() {
        return Err(CoreError::ExternalOutputMissing { path: display });
    }
    let img = load_image(&path).map_err(|e| CoreError::Stage(e.to_string()))?;
    if img.dims() != (expected_w, expected_h) {
        return Err(CoreError::ExternalSizeMismatch {
            path: display,
            expected: (expected_w, expected_h),
            actual: img.dims(),
        });
    }
    Ok(to_grayscale(&img))
}

fn require_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(SrbinError::ConfigInvalid(format!(
            "external output directory {} does not exist",
            dir.display()
        )))
    }
}

/// Super-resolution stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SrSpec {
    Identity,
    Classical { kernel: KernelKind, scale: u32 },
    External { dir: PathBuf, scale: u32 },
}

impl SrSpec {
    pub fn classical(kernel: KernelKind, scale: u32) -> Result<Self> {
        ClassicalSr::new(kernel, scale)?;
        Ok(SrSpec::Classical { kernel, scale })
    }

    pub fn external(dir: impl Into<PathBuf>, scale: u32) -> Result<Self> {
        let dir = dir.into();
        require_dir(&dir)?;
        if scale == 0 {
            return Err(CoreError::InvalidScale(scale).into());
        }
        Ok(SrSpec::External { dir, scale })
    }

    /// Parses the command-line form: `identity`, a kernel name (x2), or `external:DIR`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(dir) = s.strip_prefix("external:") {
            return SrSpec::external(dir, 2);
        }
        if s == "identity" {
            return Ok(SrSpec::Identity);
        }
        let kernel = KernelKind::from_str(s)
            .map_err(|_| SrbinError::ConfigInvalid(format!("unknown SR method '{s}'")))?;
        SrSpec::classical(kernel, 2)
    }
}

impl fmt::Display for SrSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SrSpec::Identity => f.write_str("identity"),
            SrSpec::Classical { kernel, scale } => write!(f, "{kernel} x{scale}"),
            SrSpec::External { dir, scale } => write!(f, "external:{} x{scale}", dir.display()),
        }
    }
}

impl SuperResolver for SrSpec {
    fn scale(&self) -> u32 {
        match self {
            SrSpec::Identity => 1,
            SrSpec::Classical { scale, .. } | SrSpec::External { scale, .. } => *scale,
        }
    }

    fn enlarge(&self, img: &Raster, stem: &str) -> Result<Raster, CoreError> {
        match self {
            SrSpec::Identity => ClassicalSr::Identity.enlarge(img, stem),
            SrSpec::Classical { kernel, scale } => ClassicalSr::Resample {
                kernel: *kernel,
                scale: *scale,
            }
            .enlarge(img, stem),
            SrSpec::External { dir, scale } => {
                load_external_output(dir, stem, img.width() * scale, img.height() * scale)
            }
        }
    }
}

/// Segmentation stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SegSpec {
    Otsu,
    Niblack { window: u32, k: f64 },
    Sauvola { window: u32, k: f64, r: f64 },
    External { dir: PathBuf },
}

impl SegSpec {
    pub fn external(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        require_dir(&dir)?;
        Ok(SegSpec::External { dir })
    }

    /// Builds a spec from a method name and optional overrides of the
    /// classical defaults. `external:DIR` is also accepted as a method.
    pub fn from_parts(
        method: &str,
        window: Option<u32>,
        k: Option<f64>,
        r: Option<f64>,
        dir: Option<&Path>,
    ) -> Result<Self> {
        if let Some(d) = method.strip_prefix("external:") {
            return SegSpec::external(d);
        }
        let spec = match method {
            "otsu" => SegSpec::Otsu,
            "niblack" => SegSpec::Niblack {
                window: window.unwrap_or(DEFAULT_WINDOW),
                k: k.unwrap_or(DEFAULT_NIBLACK_K),
            },
            "sauvola" => SegSpec::Sauvola {
                window: window.unwrap_or(DEFAULT_WINDOW),
                k: k.unwrap_or(DEFAULT_SAUVOLA_K),
                r: r.unwrap_or(DEFAULT_SAUVOLA_R),
            },
            "external" => {
                let d = dir.ok_or_else(|| {
                    SrbinError::ConfigInvalid("external segmentation needs --dir".into())
                })?;
                return SegSpec::external(d);
            }
            other => {
                return Err(SrbinError::ConfigInvalid(format!(
                    "unknown segmentation method '{other}'"
                )))
            }
        };
        if let Some(c) = spec.classical() {
            c.validate()?;
        }
        Ok(spec)
    }

    fn classical(&self) -> Option<ClassicalSeg> {
        match *self {
            SegSpec::Otsu => Some(ClassicalSeg::Otsu),
            SegSpec::Niblack { window, k } => Some(ClassicalSeg::Niblack { window, k }),
            SegSpec::Sauvola { window, k, r } => Some(ClassicalSeg::Sauvola { window, k, r }),
            SegSpec::External { .. } => None,
        }
    }
}

impl fmt::Display for SegSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegSpec::Otsu => f.write_str("otsu"),
            SegSpec::Niblack { window, k } => write!(f, "niblack(window={window}, k={k})"),
            SegSpec::Sauvola { window, k, r } => {
                write!(f, "sauvola(window={window}, k={k}, R={r})")
            }
            SegSpec::External { dir } => write!(f, "external:{}", dir.display()),
        }
    }
}

impl Binarizer for SegSpec {
    fn segment(&self, img: &Raster, stem: &str) -> Result<BinaryMask, CoreError> {
        match self {
            SegSpec::External { dir } => {
                let out = load_external_output(dir, stem, img.width(), img.height())?;
                mask_from_raster(&out, GT_THRESHOLD)
            }
            SegSpec::Otsu => ClassicalSeg::Otsu.segment(img, stem),
            SegSpec::Niblack { window, k } => ClassicalSeg::Niblack {
                window: *window,
                k: *k,
            }
            .segment(img, stem),
            SegSpec::Sauvola { window, k, r } => ClassicalSeg::Sauvola {
                window: *window,
                k: *k,
                r: *r,
            }
            .segment(img, stem),
        }
    }
}
