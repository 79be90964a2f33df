//! 8-bit rasters and binary masks.
//!
//! Polarity is fixed throughout the crate: a `true` mask pixel is text and
//! renders as black (0); background renders as white (255).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Default threshold used when decoding ground-truth rasters into masks.
pub const GT_THRESHOLD: u8 = 128;

/// Row-major, channel-interleaved 8-bit image with 1 (gray) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Raster {
    width: u32,
    height: u32,
    channels: u8,
    samples: Vec<u8>,
}

impl Raster {
    pub fn new(width: u32, height: u32, channels: u8, samples: Vec<u8>) -> Result<Self> {
        let expected = (width as usize) * (height as usize) * (channels as usize);
        if width == 0 || height == 0 || !matches!(channels, 1 | 3) || samples.len() != expected {
            return Err(Error::InvalidRaster {
                width,
                height,
                channels,
                len: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    /// Constant image.
    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Result<Self> {
        let len = (width as usize) * (height as usize) * (channels as usize);
        Self::new(width, height, channels, vec![value; len])
    }

    /// Single-channel image built from a per-pixel function.
    pub fn from_fn_gray(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> u8,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, 1, samples)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Sample at `(x, y)` for channel `c`.
    #[inline]
    pub fn get(&self, x: u32, y: u32, c: u8) -> u8 {
        let idx =
            (y as usize * self.width as usize + x as usize) * self.channels as usize + c as usize;
        self.samples[idx]
    }

    pub(crate) fn require_gray(&self) -> Result<()> {
        if self.channels != 1 {
            return Err(Error::ChannelsMismatch {
                expected: 1,
                actual: self.channels,
            });
        }
        Ok(())
    }

    /// Top-left crop. `width`/`height` must not exceed the current size.
    pub fn crop_top_left(&self, width: u32, height: u32) -> Result<Raster> {
        if width > self.width || height > self.height {
            return Err(Error::SizeMismatch {
                left: self.dims(),
                right: (width, height),
            });
        }
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let ch = self.channels as usize;
        let row = width as usize * ch;
        let stride = self.width as usize * ch;
        let mut samples = Vec::with_capacity(row * height as usize);
        for y in 0..height as usize {
            samples.extend_from_slice(&self.samples[y * stride..y * stride + row]);
        }
        Raster::new(width, height, self.channels, samples)
    }

    /// Splits an interleaved image into single-channel planes.
    pub fn split_channels(&self) -> Vec<Raster> {
        let ch = self.channels as usize;
        (0..ch)
            .map(|c| Raster {
                width: self.width,
                height: self.height,
                channels: 1,
                samples: self.samples.iter().skip(c).step_by(ch).copied().collect(),
            })
            .collect()
    }

    /// Inverse of [`Raster::split_channels`].
    pub fn merge_channels(planes: &[Raster]) -> Result<Raster> {
        let first = planes.first().ok_or(Error::EmptyInput)?;
        let ch = planes.len();
        if !matches!(ch, 1 | 3) {
            return Err(Error::InvalidParameter(alloc::format!(
                "cannot merge {ch} planes"
            )));
        }
        for p in planes {
            p.require_gray()?;
            if p.dims() != first.dims() {
                return Err(Error::SizeMismatch {
                    left: first.dims(),
                    right: p.dims(),
                });
            }
        }
        let mut samples = Vec::with_capacity(first.pixel_count() * ch);
        for i in 0..first.pixel_count() {
            for p in planes {
                samples.push(p.samples[i]);
            }
        }
        Raster::new(first.width, first.height, ch as u8, samples)
    }
}

/// Per-pixel text/background decision; `true` is text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    foreground: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, foreground: Vec<bool>) -> Result<Self> {
        if foreground.len() != width as usize * height as usize {
            return Err(Error::InvalidRaster {
                width,
                height,
                channels: 1,
                len: foreground.len(),
            });
        }
        Ok(Self {
            width,
            height,
            foreground,
        })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            foreground: vec![false; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn foreground(&self) -> &[bool] {
        &self.foreground
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.foreground[y as usize * self.width as usize + x as usize]
    }

    pub fn count_foreground(&self) -> usize {
        self.foreground.iter().filter(|&&f| f).count()
    }

    pub fn crop_top_left(&self, width: u32, height: u32) -> Result<BinaryMask> {
        if width > self.width || height > self.height {
            return Err(Error::SizeMismatch {
                left: self.dims(),
                right: (width, height),
            });
        }
        let mut fg = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height as usize {
            let start = y * self.width as usize;
            fg.extend_from_slice(&self.foreground[start..start + width as usize]);
        }
        BinaryMask::new(width, height, fg)
    }
}

/// Rounds half up and clamps to the 8-bit range.
#[inline]
pub(crate) fn round_to_u8(v: f64) -> u8 {
    let r = libm::floor(v + 0.5);
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// BT.601 luma with round-half-up. Single-channel input is returned unchanged.
pub fn to_grayscale(img: &Raster) -> Raster {
    if img.channels == 1 {
        return img.clone();
    }
    // Integer form of round(0.299 R + 0.587 G + 0.114 B) avoids binary fraction error.
    let samples = img
        .samples
        .chunks_exact(3)
        .map(|px| {
            let acc = 299 * px[0] as u32 + 587 * px[1] as u32 + 114 * px[2] as u32;
            ((acc + 500) / 1000) as u8
        })
        .collect();
    Raster {
        width: img.width,
        height: img.height,
        channels: 1,
        samples,
    }
}

/// `foreground[i] = samples[i] < threshold`.
pub fn mask_from_raster(img: &Raster, threshold: u8) -> Result<BinaryMask> {
    img.require_gray()?;
    Ok(BinaryMask {
        width: img.width,
        height: img.height,
        foreground: img.samples.iter().map(|&v| v < threshold).collect(),
    })
}

/// Text renders black (0), background white (255).
pub fn raster_from_mask(mask: &BinaryMask) -> Raster {
    Raster {
        width: mask.width,
        height: mask.height,
        channels: 1,
        samples: mask
            .foreground
            .iter()
            .map(|&f| if f { 0 } else { 255 })
            .collect(),
    }
}
