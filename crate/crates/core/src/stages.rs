//! The two pipeline stages: super-resolution pre-processing and binarization.
//!
//! Stages are traits so that outputs of learned models (produced elsewhere and
//! read from disk by the `srbin` crate) plug in next to the classical methods
//! defined here.

use alloc::format;
use alloc::string::String;

use crate::raster::to_grayscale;
use crate::resample::{upscale, KernelKind};
use crate::threshold::{local_threshold, otsu_binarize, LocalMethod};
use crate::{BinaryMask, Error, Raster, Result};

pub const DEFAULT_WINDOW: u32 = 25;
pub const DEFAULT_SAUVOLA_K: f64 = 0.2;
pub const DEFAULT_SAUVOLA_R: f64 = 128.0;
pub const DEFAULT_NIBLACK_K: f64 = -0.2;

/// Enlarges an image by an integer factor.
pub trait SuperResolver: Sync {
    fn scale(&self) -> u32;
    /// `stem` identifies the document; classical methods ignore it.
    fn enlarge(&self, img: &Raster, stem: &str) -> Result<Raster>;
}

/// Produces a text/background mask of the same size as its input.
pub trait Binarizer: Sync {
    /// `img` is always single-channel.
    fn segment(&self, img: &Raster, stem: &str) -> Result<BinaryMask>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "method", rename_all = "lowercase"))]
pub enum ClassicalSr {
    Identity,
    Resample { kernel: KernelKind, scale: u32 },
}

impl ClassicalSr {
    pub fn new(kernel: KernelKind, scale: u32) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidScale(scale));
        }
        if kernel == KernelKind::Box {
            return Err(Error::InvalidKernel("box filter cannot upscale"));
        }
        Ok(ClassicalSr::Resample { kernel, scale })
    }
}

impl SuperResolver for ClassicalSr {
    fn scale(&self) -> u32 {
        match self {
            ClassicalSr::Identity => 1,
            ClassicalSr::Resample { scale, .. } => *scale,
        }
    }

    fn enlarge(&self, img: &Raster, _stem: &str) -> Result<Raster> {
        match self {
            ClassicalSr::Identity => Ok(img.clone()),
            ClassicalSr::Resample { kernel, scale } => upscale(img, *scale, *kernel),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "method", rename_all = "lowercase"))]
pub enum ClassicalSeg {
    Otsu,
    Niblack { window: u32, k: f64 },
    Sauvola { window: u32, k: f64, r: f64 },
}

impl ClassicalSeg {
    pub fn niblack() -> Self {
        ClassicalSeg::Niblack {
            window: DEFAULT_WINDOW,
            k: DEFAULT_NIBLACK_K,
        }
    }

    pub fn sauvola() -> Self {
        ClassicalSeg::Sauvola {
            window: DEFAULT_WINDOW,
            k: DEFAULT_SAUVOLA_K,
            r: DEFAULT_SAUVOLA_R,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ClassicalSeg::Otsu => Ok(()),
            ClassicalSeg::Niblack { window, .. } => check_window(window),
            ClassicalSeg::Sauvola { window, r, .. } => {
                check_window(window)?;
                if r > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "Sauvola R must be > 0, got {r}"
                    )))
                }
            }
        }
    }
}

fn check_window(window: u32) -> Result<()> {
    if window < 3 || window.is_multiple_of(2) {
        Err(Error::EvenWindow(window))
    } else {
        Ok(())
    }
}

impl Binarizer for ClassicalSeg {
    fn segment(&self, img: &Raster, _stem: &str) -> Result<BinaryMask> {
        match *self {
            ClassicalSeg::Otsu => otsu_binarize(img),
            ClassicalSeg::Niblack { window, k } => {
                local_threshold(img, LocalMethod::Niblack, window, k, DEFAULT_SAUVOLA_R)
            }
            ClassicalSeg::Sauvola { window, k, r } => {
                local_threshold(img, LocalMethod::Sauvola, window, k, r)
            }
        }
    }
}

/// Runs the SR stage and checks that the output is exactly `scale` times the input.
pub fn apply_sr(img: &Raster, sr: &dyn SuperResolver, stem: &str) -> Result<Raster> {
    let out = sr.enlarge(img, stem)?;
    let scale = sr.scale();
    let expected = (img.width() * scale, img.height() * scale);
    if out.dims() != expected {
        return Err(Error::ExternalSizeMismatch {
            path: String::from(stem),
            expected,
            actual: out.dims(),
        });
    }
    Ok(out)
}

/// Converts to grayscale, segments, and checks the mask matches the input size.
pub fn binarize(img: &Raster, seg: &dyn Binarizer, stem: &str) -> Result<BinaryMask> {
    let gray = to_grayscale(img);
    let mask = seg.segment(&gray, stem)?;
    if mask.dims() != img.dims() {
        return Err(Error::ExternalSizeMismatch {
            path: String::from(stem),
            expected: img.dims(),
            actual: mask.dims(),
        });
    }
    Ok(mask)
}
