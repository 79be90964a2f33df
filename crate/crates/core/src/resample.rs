//! Separable image resampling on a center-aligned grid.
//!
//! Output pixel `d` samples source coordinate `(d + 0.5) * in / out - 0.5`.
//! Taps falling outside the image clamp to the nearest edge pixel and each
//! output pixel's weights are renormalized to sum to one. Accumulation is in
//! `f64` and rounding (half up, clamped) happens once per output sample.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::raster::round_to_u8;
use crate::{Error, Raster, Result};

/// Keys cubic convolution parameter.
pub const BICUBIC_A: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum KernelKind {
    Nearest,
    Bilinear,
    /// Keys cubic, `a = -0.5`.
    Bicubic,
    /// Sinc windowed to three lobes.
    Lanczos3,
    /// Area average over the source footprint. Only valid when shrinking.
    Box,
}

impl KernelKind {
    pub const ALL: [KernelKind; 5] = [
        KernelKind::Nearest,
        KernelKind::Bilinear,
        KernelKind::Bicubic,
        KernelKind::Lanczos3,
        KernelKind::Box,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Nearest => "nearest",
            KernelKind::Bilinear => "bilinear",
            KernelKind::Bicubic => "bicubic",
            KernelKind::Lanczos3 => "lanczos3",
            KernelKind::Box => "box",
        }
    }

    /// Half-width of the kernel's support at unit scale.
    fn radius(self) -> f64 {
        match self {
            KernelKind::Nearest | KernelKind::Box => 0.5,
            KernelKind::Bilinear => 1.0,
            KernelKind::Bicubic => 2.0,
            KernelKind::Lanczos3 => 3.0,
        }
    }

    /// Continuous kernel value at signed distance `x` (unit scale).
    pub fn eval(self, x: f64) -> f64 {
        let ax = libm::fabs(x);
        match self {
            KernelKind::Nearest | KernelKind::Box => {
                if ax < 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::Bilinear => {
                if ax < 1.0 {
                    1.0 - ax
                } else {
                    0.0
                }
            }
            KernelKind::Bicubic => keys_cubic(ax, BICUBIC_A),
            KernelKind::Lanczos3 => lanczos(ax, 3.0),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidKernel("unknown kernel name"))
    }
}

fn keys_cubic(ax: f64, a: f64) -> f64 {
    if ax <= 1.0 {
        ((a + 2.0) * ax - (a + 3.0)) * ax * ax + 1.0
    } else if ax < 2.0 {
        ((a * ax - 5.0 * a) * ax + 8.0 * a) * ax - 4.0 * a
    } else {
        0.0
    }
}

fn sinc(x: f64) -> f64 {
    let px = core::f64::consts::PI * x;
    libm::sin(px) / px
}

fn lanczos(ax: f64, lobes: f64) -> f64 {
    if ax == 0.0 {
        1.0
    } else if ax >= lobes || ax == libm::floor(ax) {
        // sin(k*pi) is not exactly zero in floating point; integers are true zeros.
        0.0
    } else {
        sinc(ax) * sinc(ax / lobes)
    }
}

/// Normalized tap weights for a continuous kernel centred at source
/// coordinate `center`, stretched by `stretch >= 1` (used when shrinking).
/// Returns `(source index, weight)` pairs before edge clamping.
pub fn tap_weights(kernel: KernelKind, center: f64, stretch: f64) -> Vec<(i64, f64)> {
    let radius = kernel.radius() * stretch;
    let lo = libm::ceil(center - radius) as i64;
    let hi = libm::floor(center + radius) as i64;
    let mut taps: Vec<(i64, f64)> = (lo..=hi)
        .map(|j| (j, kernel.eval((j as f64 - center) / stretch)))
        .filter(|&(_, w)| w != 0.0)
        .collect();
    let sum: f64 = taps.iter().map(|t| t.1).sum();
    for t in &mut taps {
        t.1 /= sum;
    }
    taps
}

/// One output coordinate's contributions: clamped source index and weight.
type Taps = Vec<(usize, f64)>;

fn axis_taps(kernel: KernelKind, in_len: u32, out_len: u32) -> Vec<Taps> {
    let n = in_len as i64;
    let clamp = |j: i64| j.clamp(0, n - 1) as usize;
    let ratio = in_len as f64 / out_len as f64;
    (0..out_len as u64)
        .map(|d| match kernel {
            KernelKind::Nearest => {
                // floor((d + 0.5) * in / out), in exact integer arithmetic.
                let idx = ((2 * d + 1) * in_len as u64) / (2 * out_len as u64);
                vec![(clamp(idx as i64), 1.0)]
            }
            KernelKind::Box => box_taps(d, ratio, in_len),
            _ => {
                let center = (d as f64 + 0.5) * ratio - 0.5;
                let stretch = if ratio > 1.0 { ratio } else { 1.0 };
                let mut taps: Taps = Vec::new();
                for (j, w) in tap_weights(kernel, center, stretch) {
                    let j = clamp(j);
                    match taps.iter_mut().find(|t| t.0 == j) {
                        Some(t) => t.1 += w,
                        None => taps.push((j, w)),
                    }
                }
                taps
            }
        })
        .collect()
}

fn box_taps(d: u64, ratio: f64, in_len: u32) -> Taps {
    let start = d as f64 * ratio;
    let end = (d + 1) as f64 * ratio;
    let first = libm::floor(start) as usize;
    let last = (libm::ceil(end) as usize).min(in_len as usize);
    let mut taps: Taps = (first..last)
        .map(|i| {
            let lo = if (i as f64) > start { i as f64 } else { start };
            let hi = if ((i + 1) as f64) < end {
                (i + 1) as f64
            } else {
                end
            };
            (i, hi - lo)
        })
        .filter(|t| t.1 > 0.0)
        .collect();
    let sum: f64 = taps.iter().map(|t| t.1).sum();
    for t in &mut taps {
        t.1 /= sum;
    }
    taps
}

/// Resamples to an arbitrary size. `Box` is only accepted when neither axis grows.
pub fn resample(img: &Raster, out_w: u32, out_h: u32, kernel: KernelKind) -> Result<Raster> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "output size {out_w}x{out_h} must be positive"
        )));
    }
    if kernel == KernelKind::Box && (out_w > img.width() || out_h > img.height()) {
        return Err(Error::InvalidKernel("box filter only supports shrinking"));
    }
    let (w, h) = img.dims();
    let ch = img.channels() as usize;
    let xt = axis_taps(kernel, w, out_w);
    let yt = axis_taps(kernel, h, out_h);
    let src = img.samples();

    // Horizontal pass: h rows of out_w pixels, kept in f64.
    let mut tmp = vec![0.0f64; out_w as usize * h as usize * ch];
    for y in 0..h as usize {
        let src_row = &src[y * w as usize * ch..(y + 1) * w as usize * ch];
        let dst_row = &mut tmp[y * out_w as usize * ch..(y + 1) * out_w as usize * ch];
        for (x, taps) in xt.iter().enumerate() {
            for c in 0..ch {
                dst_row[x * ch + c] = taps
                    .iter()
                    .map(|&(i, wt)| src_row[i * ch + c] as f64 * wt)
                    .sum();
            }
        }
    }

    // Vertical pass with the single rounding step.
    let row_len = out_w as usize * ch;
    let mut out = vec![0u8; row_len * out_h as usize];
    for (y, taps) in yt.iter().enumerate() {
        let dst_row = &mut out[y * row_len..(y + 1) * row_len];
        for (k, dst) in dst_row.iter_mut().enumerate() {
            let v: f64 = taps.iter().map(|&(j, wt)| tmp[j * row_len + k] * wt).sum();
            *dst = round_to_u8(v);
        }
    }
    Raster::new(out_w, out_h, img.channels(), out)
}

/// Integer-factor enlargement.
pub fn upscale(img: &Raster, scale: u32, kernel: KernelKind) -> Result<Raster> {
    if scale == 0 {
        return Err(Error::InvalidScale(scale));
    }
    if kernel == KernelKind::Box {
        return Err(Error::InvalidKernel("box filter cannot upscale"));
    }
    resample(img, img.width() * scale, img.height() * scale, kernel)
}

/// Halves each dimension (floor) by averaging 2x2 blocks with round-half-up.
/// A trailing odd row or column is dropped.
pub fn downscale_half(img: &Raster) -> Result<Raster> {
    let (w, h) = img.dims();
    if w < 2 || h < 2 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_width: 2,
            min_height: 2,
        });
    }
    let (ow, oh) = (w / 2, h / 2);
    let ch = img.channels();
    let mut out = Vec::with_capacity(ow as usize * oh as usize * ch as usize);
    for y in 0..oh {
        for x in 0..ow {
            for c in 0..ch {
                let sum = img.get(2 * x, 2 * y, c) as u32
                    + img.get(2 * x + 1, 2 * y, c) as u32
                    + img.get(2 * x, 2 * y + 1, c) as u32
                    + img.get(2 * x + 1, 2 * y + 1, c) as u32;
                out.push(((sum + 2) / 4) as u8);
            }
        }
    }
    Raster::new(ow, oh, ch, out)
}
