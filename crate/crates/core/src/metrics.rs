//! PSNR, SSIM and F-measure.
//!
//! SSIM uses the customary settings: an 11x11 Gaussian window with sigma 1.5,
//! `K1 = 0.01`, `K2 = 0.03`, `L = 255`, averaged over every window that lies
//! fully inside the image (no padding).

use alloc::vec;

use crate::raster::raster_from_mask;
use crate::{BinaryMask, Error, Raster, Result};

pub const PEAK: f64 = 255.0;
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
/// `(0.01 * 255)^2`
pub const SSIM_C1: f64 = 6.5025;
/// `(0.03 * 255)^2`
pub const SSIM_C2: f64 = 58.5225;

/// Mean squared error and PSNR; `db` is `None` when the images are identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psnr {
    pub mse: f64,
    pub db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FMeasure {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub tp: u64,
    pub fp: u64,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: u64,
    pub tn: u64,
}

/// Metrics for one predicted mask against its ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    pub mse: f64,
    /// `None` means infinite (`mse == 0`).
    pub psnr_db: Option<f64>,
    pub ssim: f64,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub binary: Option<FMeasure>,
}

fn same_gray(a: &Raster, b: &Raster) -> Result<()> {
    a.require_gray()?;
    b.require_gray()?;
    if a.dims() != b.dims() {
        return Err(Error::SizeMismatch {
            left: a.dims(),
            right: b.dims(),
        });
    }
    Ok(())
}

pub fn psnr(a: &Raster, b: &Raster) -> Result<Psnr> {
    same_gray(a, b)?;
    let sse: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    let mse = sse as f64 / a.pixel_count() as f64;
    let db = (sse != 0).then(|| 10.0 * libm::log10(PEAK * PEAK / mse));
    Ok(Psnr { mse, db })
}

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let mut g = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, v) in g.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = libm::exp(-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
    }
    let s: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= s);
    g
}

pub fn ssim(a: &Raster, b: &Raster) -> Result<f64> {
    same_gray(a, b)?;
    let (w, h) = (a.width() as usize, a.height() as usize);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            width: a.width(),
            height: a.height(),
            min_width: SSIM_WINDOW as u32,
            min_height: SSIM_WINDOW as u32,
        });
    }
    let g = gaussian_taps();
    let (ow, oh) = (w - SSIM_WINDOW + 1, h - SSIM_WINDOW + 1);
    let (xs, ys) = (a.samples(), b.samples());

    // Horizontal pass: per row, filtered x, y, x^2, y^2, xy at valid columns.
    let mut rows = vec![[0.0f64; 5]; ow * h];
    for r in 0..h {
        for c in 0..ow {
            let mut acc = [0.0f64; 5];
            for (k, &wk) in g.iter().enumerate() {
                let x = xs[r * w + c + k] as f64;
                let y = ys[r * w + c + k] as f64;
                acc[0] += wk * x;
                acc[1] += wk * y;
                acc[2] += wk * (x * x);
                acc[3] += wk * (y * y);
                acc[4] += wk * (x * y);
            }
            rows[r * ow + c] = acc;
        }
    }

    let mut total = 0.0;
    for r in 0..oh {
        for c in 0..ow {
            let mut m = [0.0f64; 5];
            for (k, &wk) in g.iter().enumerate() {
                let src = &rows[(r + k) * ow + c];
                for q in 0..5 {
                    m[q] += wk * src[q];
                }
            }
            total += local_ssim(m);
        }
    }
    Ok(total / (ow * oh) as f64)
}

/// SSIM of one window from its weighted moments `[E x, E y, E x^2, E y^2, E xy]`.
fn local_ssim(m: [f64; 5]) -> f64 {
    let (mx, my) = (m[0], m[1]);
    let vx = m[2] - mx * mx;
    let vy = m[3] - my * my;
    let cov = m[4] - mx * my;
    ((2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2))
}

/// Precision, recall and F-measure over text pixels.
///
/// An empty denominator in precision or recall counts as 1, so an empty
/// prediction against an empty ground truth scores 1 and any false alarm
/// against an empty ground truth scores 0. `P + R = 0` gives 0.
pub fn f_measure(pred: &BinaryMask, gt: &BinaryMask) -> Result<FMeasure> {
    if pred.dims() != gt.dims() {
        return Err(Error::SizeMismatch {
            left: pred.dims(),
            right: gt.dims(),
        });
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
    for (&p, &g) in pred.foreground().iter().zip(gt.foreground()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(FMeasure {
        precision,
        recall,
        f_measure,
        tp,
        fp,
        fn_,
        tn,
    })
}

/// PSNR and SSIM on the black/white renders of both masks plus F-measure on
/// the masks themselves.
pub fn metric_suite(pred: &BinaryMask, gt: &BinaryMask) -> Result<MetricReport> {
    let fm = f_measure(pred, gt)?;
    let (p, g) = (raster_from_mask(pred), raster_from_mask(gt));
    let Psnr { mse, db } = psnr(&p, &g)?;
    let ssim = ssim(&p, &g)?;
    Ok(MetricReport {
        mse,
        psnr_db: db,
        ssim,
        binary: Some(fm),
    })
}
