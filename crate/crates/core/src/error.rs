use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Sample buffer does not match `width * height * channels`, or a zero dimension.
    InvalidRaster {
        width: u32,
        height: u32,
        channels: u8,
        len: usize,
    },
    ChannelsMismatch {
        expected: u8,
        actual: u8,
    },
    SizeMismatch {
        left: (u32, u32),
        right: (u32, u32),
    },
    ImageTooSmall {
        width: u32,
        height: u32,
        min_width: u32,
        min_height: u32,
    },
    InvalidKernel(&'static str),
    InvalidScale(u32),
    EvenWindow(u32),
    InvalidParameter(String),
    EmptyHistogram,
    HistogramTooLarge(u64),
    EmptyInput,
    ExternalOutputMissing {
        path: String,
    },
    ExternalSizeMismatch {
        path: String,
        expected: (u32, u32),
        actual: (u32, u32),
    },
    /// A stage failure annotated with the protocol branch and entry id.
    Branch {
        branch: &'static str,
        id: String,
        source: Box<Error>,
    },
    /// Failure reported by a stage implementation outside this crate.
    Stage(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidRaster {
                width,
                height,
                channels,
                len,
            } => write!(
                f,
                "invalid raster: {width}x{height}x{channels} needs {} samples, got {len}",
                (*width as usize) * (*height as usize) * (*channels as usize)
            ),
            Error::ChannelsMismatch { expected, actual } => {
                write!(
                    f,
                    "expected {expected}-channel image, got {actual} channels"
                )
            }
            Error::SizeMismatch { left, right } => write!(
                f,
                "size mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::ImageTooSmall {
                width,
                height,
                min_width,
                min_height,
            } => write!(
                f,
                "image too small: {width}x{height} (minimum {min_width}x{min_height})"
            ),
            Error::InvalidKernel(msg) => write!(f, "invalid kernel: {msg}"),
            Error::InvalidScale(s) => write!(f, "invalid scale factor {s}"),
            Error::EvenWindow(w) => write!(f, "window must be odd and >= 3, got {w}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::EmptyHistogram => f.write_str("histogram has no samples"),
            Error::HistogramTooLarge(n) => {
                write!(f, "histogram total {n} exceeds the 2^28 sample limit")
            }
            Error::EmptyInput => f.write_str("empty input"),
            Error::ExternalOutputMissing { path } => {
                write!(f, "external stage output missing: {path}")
            }
            Error::ExternalSizeMismatch {
                path,
                expected,
                actual,
            } => write!(
                f,
                "external stage output {path} has size {}x{}, expected {}x{}",
                actual.0, actual.1, expected.0, expected.1
            ),
            Error::Branch { branch, id, source } => write!(f, "[{branch}] {id}: {source}"),
            Error::Stage(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Branch { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
