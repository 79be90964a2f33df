use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = SrbinError> = std::result::Result<T, E>;

pub(crate) const CONVERT_HINT: &str =
    "supported formats are 8-bit PNG (gray or RGB, no alpha), binary PGM (P5) and PPM (P6) with maxval 255; convert TIFF/BMP sources to PNG first";

#[derive(Debug, Error)]
pub enum SrbinError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("{}: unsupported format: {reason}; {CONVERT_HINT}", path.display())]
    UnsupportedFormat { path: PathBuf, reason: String },
    #[error("{}: corrupt image: {reason}", path.display())]
    CorruptImage { path: PathBuf, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: invalid JSON: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("no input/ground-truth pairs found in {}{}", dir.display(), fmt_diagnostics(diagnostics))]
    EmptyDataset {
        dir: PathBuf,
        diagnostics: Vec<String>,
    },
    #[error("invalid experiment configuration: {0}")]
    ConfigInvalid(String),
    #[error("all {count} entries failed; first error: {first}")]
    AllEntriesFailed { count: usize, first: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] srbin_core::Error),
}

fn fmt_diagnostics(d: &[String]) -> String {
    if d.is_empty() {
        String::new()
    } else {
        format!(" ({})", d.join("; "))
    }
}

impl SrbinError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            SrbinError::FileNotFound(path)
        } else {
            SrbinError::Io { path, source }
        }
    }
}
