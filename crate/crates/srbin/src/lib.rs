//! Files, external model outputs, dataset manifests, experiment runs and the
//! `srbin` command line, built on [`srbin_core`].

pub mod cli;
pub mod error;
pub mod experiment;
pub mod image_io;
pub mod manifest;
pub mod report;
pub mod stages;

pub use error::{Result, SrbinError};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport};
pub use image_io::{load_image, save_image};
pub use manifest::{scan_dataset, Manifest};
pub use stages::{SegSpec, SrSpec};
