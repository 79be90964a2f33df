//! 8-bit PNG and binary PGM/PPM reading and writing.
//!
//! The format is taken from the file's magic bytes. A `.pgm` name holding a
//! PPM stream (or the reverse) is rejected, as are alpha channels, 16-bit
//! samples and PNM maxval other than 255.

use std::fs;
use std::io::{Cursor, Write};
use std::path::Path;

use srbin_core::Raster;

use crate::error::{Result, SrbinError};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Pgm,
    Ppm,
}

impl ImageFormat {
    /// Format implied by a file extension, case-insensitive.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png),
            "pgm" => Some(ImageFormat::Pgm),
            "ppm" => Some(ImageFormat::Ppm),
            _ => None,
        }
    }
}

fn unsupported(path: &Path, reason: impl Into<String>) -> SrbinError {
    SrbinError::UnsupportedFormat {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn corrupt(path: &Path, reason: impl Into<String>) -> SrbinError {
    SrbinError::CorruptImage {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn load_image(path: &Path) -> Result<Raster> {
    let bytes = fs::read(path).map_err(|e| SrbinError::io(path, e))?;
    decode_image(path, &bytes)
}

/// Decodes an in-memory file; `path` is used for messages and the extension check.
pub fn decode_image(path: &Path, bytes: &[u8]) -> Result<Raster> {
    let claimed = ImageFormat::from_path(path);
    if bytes.starts_with(PNG_MAGIC) {
        if claimed.is_some_and(|f| f != ImageFormat::Png) {
            return Err(unsupported(path, "PNG data under a PGM/PPM name"));
        }
        return decode_png(path, bytes);
    }
    match bytes.get(..2) {
        Some(b"P5") => {
            if claimed == Some(ImageFormat::Ppm) {
                return Err(unsupported(path, "PGM data under a .ppm name"));
            }
            decode_pnm(path, bytes, 1)
        }
        Some(b"P6") => {
            if claimed == Some(ImageFormat::Pgm) {
                return Err(unsupported(path, "3-channel PPM data under a .pgm name"));
            }
            decode_pnm(path, bytes, 3)
        }
        Some(b"P2") | Some(b"P3") => Err(unsupported(path, "ASCII PNM is not supported")),
        Some(b"II") | Some(b"MM") => Err(unsupported(path, "TIFF")),
        Some(b"BM") => Err(unsupported(path, "BMP")),
        _ => Err(unsupported(path, "unrecognized magic bytes")),
    }
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<Raster> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let map_err = |e: png::DecodingError| match e {
        png::DecodingError::LimitsExceeded => unsupported(path, "image exceeds decoder limits"),
        other => corrupt(path, other.to_string()),
    };
    let mut reader = decoder.read_info().map_err(map_err)?;
    let info = reader.info();
    if info.bit_depth == png::BitDepth::Sixteen {
        return Err(unsupported(path, "16-bit PNG"));
    }
    if info.trns.is_some() {
        return Err(unsupported(path, "PNG with transparency"));
    }
    let (width, height) = (info.width, info.height);
    let (color, depth) = reader.output_color_type();
    let channels = match color {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        png::ColorType::GrayscaleAlpha | png::ColorType::Rgba => {
            return Err(unsupported(path, "PNG with alpha channel"))
        }
        png::ColorType::Indexed => return Err(unsupported(path, "unexpanded palette PNG")),
    };
    if depth != png::BitDepth::Eight {
        return Err(unsupported(path, format!("{depth:?} bit PNG")));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| corrupt(path, "image too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(map_err)?;
    buf.truncate(frame.buffer_size());
    // Rows are tightly packed for 8-bit output.
    Raster::new(width, height, channels, buf).map_err(|e| corrupt(path, e.to_string()))
}

/// Parses a binary PNM header: magic, width, height, maxval, with `#`
/// comments, followed by exactly one whitespace byte.
fn decode_pnm(path: &Path, bytes: &[u8], channels: u8) -> Result<Raster> {
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in &mut fields {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(corrupt(path, "truncated PNM header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(corrupt(path, "malformed PNM header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| corrupt(path, "PNM header value out of range"))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(corrupt(path, "malformed PNM header"));
    }
    pos += 1;
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(unsupported(
            path,
            format!("PNM maxval {maxval} (only 255 is accepted)"),
        ));
    }
    if w == 0 || h == 0 || w > u32::MAX as u64 || h > u32::MAX as u64 {
        return Err(corrupt(path, format!("invalid PNM size {w}x{h}")));
    }
    let len = (w * h) as usize * channels as usize;
    let body = bytes
        .get(pos..pos + len)
        .ok_or_else(|| corrupt(path, "truncated PNM data"))?;
    Raster::new(w as u32, h as u32, channels, body.to_vec())
        .map_err(|e| corrupt(path, e.to_string()))
}

/// Encodes `img` in the format named by `path`'s extension.
pub fn encode_image(img: &Raster, path: &Path) -> Result<Vec<u8>> {
    let format = ImageFormat::from_path(path)
        .ok_or_else(|| unsupported(path, "output extension must be .png, .pgm or .ppm"))?;
    match format {
        ImageFormat::Png => {
            let mut out = Vec::new();
            let mut enc = png::Encoder::new(&mut out, img.width(), img.height());
            enc.set_color(if img.channels() == 1 {
                png::ColorType::Grayscale
            } else {
                png::ColorType::Rgb
            });
            enc.set_depth(png::BitDepth::Eight);
            let write_err = |e: png::EncodingError| corrupt(path, e.to_string());
            let mut writer = enc.write_header().map_err(write_err)?;
            writer.write_image_data(img.samples()).map_err(write_err)?;
            writer.finish().map_err(write_err)?;
            Ok(out)
        }
        ImageFormat::Pgm | ImageFormat::Ppm => {
            let (magic, channels) = if format == ImageFormat::Pgm {
                ("P5", 1)
            } else {
                ("P6", 3)
            };
            if img.channels() != channels {
                return Err(unsupported(
                    path,
                    format!(
                        "{}-channel image cannot be stored as {magic}",
                        img.channels()
                    ),
                ));
            }
            let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
            out.extend_from_slice(img.samples());
            Ok(out)
        }
    }
}

pub fn save_image(img: &Raster, path: &Path) -> Result<()> {
    let bytes = encode_image(img, path)?;
    write_atomic(path, &bytes)
}

/// Writes to a temporary file in the target directory, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| SrbinError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| SrbinError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| SrbinError::io(path, e.error))?;
    Ok(())
}
