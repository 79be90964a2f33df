//! Classical global and local thresholding.

use alloc::vec;
use alloc::vec::Vec;

use crate::{BinaryMask, Error, Raster, Result};

/// Largest histogram total accepted by [`otsu_threshold`]; keeps the exact
/// integer comparison inside 192 bits.
pub const OTSU_MAX_SAMPLES: u64 = 1 << 28;

pub fn histogram(img: &Raster) -> Result<[u64; 256]> {
    img.require_gray()?;
    let mut hist = [0u64; 256];
    for &v in img.samples() {
        hist[v as usize] += 1;
    }
    Ok(hist)
}

/// `x * y` as a 192-bit value `(bits 64.., bits 0..64)`.
fn wide_mul(x: u128, y: u64) -> (u128, u64) {
    let lo = (x as u64 as u128) * y as u128;
    let hi = (x >> 64) * y as u128;
    (hi + (lo >> 64), lo as u64)
}

/// Otsu's threshold: the `t` maximizing the between-class variance of
/// `[0..=t]` against `[t+1..=255]`, smallest `t` on ties. Pixels `<= t` are
/// foreground.
///
/// The between-class variance equals `D^2 / (N^2 n0 n1)` with
/// `D = S0 N - S n0`, so candidates are compared exactly in integers.
pub fn otsu_threshold(hist: &[u64; 256]) -> Result<u8> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    if total > OTSU_MAX_SAMPLES {
        return Err(Error::HistogramTooLarge(total));
    }
    let sum: u128 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * c as u128)
        .sum();

    let mut best_t = 0u8;
    // Score as (D^2, n0 * n1); zero product means an empty class.
    let mut best: (u128, u64) = (0, 0);
    let (mut n0, mut s0) = (0u64, 0u128);
    for (t, &count) in hist.iter().enumerate() {
        n0 += count;
        s0 += t as u128 * count as u128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let d = (s0 * total as u128) as i128 - (sum * n0 as u128) as i128;
        let d2 = d.unsigned_abs().pow(2);
        let prod = n0 * n1;
        let better = if best.1 == 0 {
            d2 > 0
        } else {
            wide_mul(d2, best.1) > wide_mul(best.0, prod)
        };
        if better {
            best = (d2, prod);
            best_t = t as u8;
        }
    }
    Ok(best_t)
}

/// Global Otsu binarization of a grayscale image.
pub fn otsu_binarize(img: &Raster) -> Result<BinaryMask> {
    let t = otsu_threshold(&histogram(img)?)?;
    BinaryMask::new(
        img.width(),
        img.height(),
        img.samples().iter().map(|&v| v <= t).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalMethod {
    /// `T = m + k s`
    Niblack,
    /// `T = m (1 + k (s / R - 1))`
    Sauvola,
}

/// Windowed mean and population standard deviation of every pixel, with the
/// window clipped to the image. Backed by summed-area tables of values and
/// squared values.
#[derive(Debug, Clone)]
pub struct WindowStats {
    width: u32,
    height: u32,
    half: u32,
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
}

impl WindowStats {
    pub fn new(img: &Raster, window: u32) -> Result<Self> {
        img.require_gray()?;
        check_window(window)?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let stride = w + 1;
        let mut sum = vec![0u64; stride * (h + 1)];
        let mut sum_sq = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let (mut row, mut row_sq) = (0u64, 0u64);
            for x in 0..w {
                let v = img.samples()[y * w + x] as u64;
                row += v;
                row_sq += v * v;
                sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row;
                sum_sq[(y + 1) * stride + x + 1] = sum_sq[y * stride + x + 1] + row_sq;
            }
        }
        Ok(Self {
            width: img.width(),
            height: img.height(),
            half: window / 2,
            sum,
            sum_sq,
        })
    }

    /// `(mean, std)` over the clipped window centred at `(x, y)`.
    pub fn at(&self, x: u32, y: u32) -> (f64, f64) {
        let x0 = x.saturating_sub(self.half) as usize;
        let y0 = y.saturating_sub(self.half) as usize;
        let x1 = (x + self.half).min(self.width - 1) as usize + 1;
        let y1 = (y + self.half).min(self.height - 1) as usize + 1;
        let stride = self.width as usize + 1;
        let rect = |t: &[u64]| {
            t[y1 * stride + x1] + t[y0 * stride + x0] - t[y0 * stride + x1] - t[y1 * stride + x0]
        };
        let n = ((x1 - x0) * (y1 - y0)) as f64;
        let mean = rect(&self.sum) as f64 / n;
        let var = rect(&self.sum_sq) as f64 / n - mean * mean;
        (mean, libm::sqrt(var.max(0.0)))
    }
}

fn check_window(window: u32) -> Result<()> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::EvenWindow(window));
    }
    Ok(())
}

/// Niblack or Sauvola binarization; a pixel is text iff its value is below
/// the local threshold. `r` is only used by Sauvola.
pub fn local_threshold(
    img: &Raster,
    method: LocalMethod,
    window: u32,
    k: f64,
    r: f64,
) -> Result<BinaryMask> {
    if method == LocalMethod::Sauvola && (r.is_nan() || r <= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "Sauvola R must be > 0, got {r}"
        )));
    }
    let stats = WindowStats::new(img, window)?;
    let mut fg = Vec::with_capacity(img.pixel_count());
    for y in 0..img.height() {
        for x in 0..img.width() {
            let (m, s) = stats.at(x, y);
            let t = match method {
                LocalMethod::Niblack => m + k * s,
                LocalMethod::Sauvola => m * (1.0 + k * (s / r - 1.0)),
            };
            fg.push((img.get(x, y, 0) as f64) < t);
        }
    }
    BinaryMask::new(img.width(), img.height(), fg)
}
