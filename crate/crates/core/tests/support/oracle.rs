//! Direct-formula reference implementations. These deliberately avoid the
//! library's code paths (no separable filtering, no integral images, no
//! cumulative sums) so they can check it.
#![allow(dead_code, clippy::needless_range_loop)]

use num::{BigInt, BigRational, Zero};
use srbin_core::synth::SplitMix64;
use srbin_core::{BinaryMask, Raster};

pub fn random_gray(rng: &mut SplitMix64, w: u32, h: u32) -> Raster {
    let samples = (0..w * h).map(|_| (rng.next() & 0xff) as u8).collect();
    Raster::new(w, h, 1, samples).unwrap()
}

pub fn random_mask(rng: &mut SplitMix64, w: u32, h: u32, density_pct: u64) -> BinaryMask {
    let fg = (0..w * h).map(|_| rng.next() % 100 < density_pct).collect();
    BinaryMask::new(w, h, fg).unwrap()
}

/// `(mse, psnr)` with `psnr = None` for identical images.
pub fn psnr(a: &Raster, b: &Raster) -> (f64, Option<f64>) {
    let n = a.samples().len() as f64;
    let mut acc = 0.0f64;
    for i in 0..a.samples().len() {
        let d = a.samples()[i] as f64 - b.samples()[i] as f64;
        acc += d * d;
    }
    let mse = acc / n;
    if mse == 0.0 {
        (mse, None)
    } else {
        (mse, Some(10.0 * (255.0f64 * 255.0 / mse).log10()))
    }
}

/// Mean of per-window SSIM using an explicit, directly normalized 2-D
/// Gaussian window and two-pass (mean, then centred moments) statistics.
pub fn ssim(a: &Raster, b: &Raster) -> f64 {
    const N: usize = 11;
    let sigma = 1.5f64;
    let mut k = [[0.0f64; N]; N];
    let mut total = 0.0;
    for (i, row) in k.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp();
            total += *v;
        }
    }
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let w = a.width() as usize;
    let (ow, oh) = (w - N + 1, a.height() as usize - N + 1);
    let px = |img: &Raster, x: usize, y: usize| img.samples()[y * w + x] as f64;
    let mut sum = 0.0;
    for y0 in 0..oh {
        for x0 in 0..ow {
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..N {
                for j in 0..N {
                    let wt = k[i][j] / total;
                    mx += wt * px(a, x0 + j, y0 + i);
                    my += wt * px(b, x0 + j, y0 + i);
                }
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for i in 0..N {
                for j in 0..N {
                    let wt = k[i][j] / total;
                    let dx = px(a, x0 + j, y0 + i) - mx;
                    let dy = px(b, x0 + j, y0 + i) - my;
                    vx += wt * dx * dx;
                    vy += wt * dy * dy;
                    cxy += wt * dx * dy;
                }
            }
            sum += ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
    }
    sum / (ow * oh) as f64
}

/// `(precision, recall, f_measure)` by explicit counting.
pub fn f_measure(pred: &BinaryMask, gt: &BinaryMask) -> (f64, f64, f64) {
    let p = pred.foreground();
    let g = gt.foreground();
    let tp = (0..p.len()).filter(|&i| p[i] && g[i]).count() as f64;
    let pred_pos = p.iter().filter(|&&v| v).count() as f64;
    let gt_pos = g.iter().filter(|&&v| v).count() as f64;
    let precision = if pred_pos == 0.0 { 1.0 } else { tp / pred_pos };
    let recall = if gt_pos == 0.0 { 1.0 } else { tp / gt_pos };
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f)
}

/// Exhaustive Otsu over all 256 thresholds in exact rational arithmetic,
/// using `w0 w1 (mu0 - mu1)^2` directly. Smallest `t` wins ties.
pub fn otsu(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    let big = |v: u64| BigRational::from_integer(BigInt::from(v));
    let mut best = (0u8, BigRational::zero());
    for t in 0..256usize {
        let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
        for (v, &c) in hist.iter().enumerate() {
            if v <= t {
                n0 += c;
                s0 += v as u64 * c;
            } else {
                n1 += c;
                s1 += v as u64 * c;
            }
        }
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let w0 = big(n0) / big(total);
        let w1 = big(n1) / big(total);
        let d = big(s0) / big(n0) - big(s1) / big(n1);
        let score = w0 * w1 * d.clone() * d;
        if score > best.1 {
            best = (t as u8, score);
        }
    }
    best.0
}

/// `(mean, population std)` over the clipped window, one pixel at a time.
pub fn window_stats(img: &Raster, window: u32, x: u32, y: u32) -> (f64, f64) {
    let r = (window / 2) as i64;
    let mut vals = Vec::new();
    for yy in y as i64 - r..=y as i64 + r {
        for xx in x as i64 - r..=x as i64 + r {
            if xx >= 0 && yy >= 0 && (xx as u32) < img.width() && (yy as u32) < img.height() {
                vals.push(img.get(xx as u32, yy as u32, 0) as f64);
            }
        }
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
