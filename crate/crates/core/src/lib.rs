//! Pure algorithmic core for evaluating super-resolution as a pre-processing
//! step for document image binarization.
//!
//! Everything in this crate works on in-memory rasters and needs only `alloc`.
//! File formats, external model outputs, manifests and the command line live
//! in the `srbin` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod metrics;
pub mod montage;
pub mod protocol;
pub mod raster;
pub mod resample;
pub mod stages;
pub mod synth;
pub mod threshold;

pub use error::{Error, Result};
pub use metrics::{f_measure, metric_suite, psnr, ssim, FMeasure, MetricReport, Psnr};
pub use raster::{BinaryMask, Raster};
pub use resample::KernelKind;
