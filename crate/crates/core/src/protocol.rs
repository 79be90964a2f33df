//! The with/without super-resolution comparison for a single document, and
//! the aggregation of per-document metrics.
//!
//! Both branches start from the half-size document. `without_sr` segments the
//! half-size image and scores it against a half-size ground truth; `with_sr`
//! enlarges the half-size image by 2 before segmenting and scores it against
//! the original ground truth, cropped to the even-dimension region.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::metrics::{metric_suite, MetricReport};
use crate::raster::to_grayscale;
use crate::resample::downscale_half;
use crate::stages::{apply_sr, binarize, Binarizer, SuperResolver};
use crate::{BinaryMask, Error, Raster, Result};

/// The protocol is defined around a x2 enlargement.
pub const PROTOCOL_SCALE: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Branch {
    WithSr,
    WithoutSr,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::WithSr, Branch::WithoutSr];

    pub fn name(self) -> &'static str {
        match self {
            Branch::WithSr => "with_sr",
            Branch::WithoutSr => "without_sr",
        }
    }

    /// Short label used in tables.
    pub fn label(self) -> &'static str {
        match self {
            Branch::WithSr => "w/ SR",
            Branch::WithoutSr => "w/o SR",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one branch on one document.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRun {
    pub branch: Branch,
    pub metrics: MetricReport,
    /// Size at which prediction and ground truth were compared.
    pub width: u32,
    pub height: u32,
    pub mask: BinaryMask,
}

/// Halves a ground-truth mask: a 2x2 block is text iff at least 3 of its
/// pixels are text. Two-two ties go to background. Odd trailing row/column
/// is dropped.
pub fn downscale_gt(gt: &BinaryMask) -> Result<BinaryMask> {
    let (w, h) = gt.dims();
    if w < 2 || h < 2 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_width: 2,
            min_height: 2,
        });
    }
    let (ow, oh) = (w / 2, h / 2);
    let mut fg = alloc::vec::Vec::with_capacity(ow as usize * oh as usize);
    for y in 0..oh {
        for x in 0..ow {
            let n = [(0, 0), (1, 0), (0, 1), (1, 1)]
                .iter()
                .filter(|&&(dx, dy)| gt.get(2 * x + dx, 2 * y + dy))
                .count();
            fg.push(n >= 3);
        }
    }
    BinaryMask::new(ow, oh, fg)
}

fn annotate(branch: Branch, id: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Branch {
        branch: branch.name(),
        id: String::from(id),
        source: Box::new(e),
    }
}

fn check_pair(input: &Raster, gt: &BinaryMask) -> Result<()> {
    if input.dims() != gt.dims() {
        return Err(Error::SizeMismatch {
            left: input.dims(),
            right: gt.dims(),
        });
    }
    Ok(())
}

/// Segment the half-size document and compare with the half-size ground truth.
pub fn run_without_sr(
    input: &Raster,
    gt: &BinaryMask,
    seg: &dyn Binarizer,
    stem: &str,
) -> Result<BranchRun> {
    let branch = Branch::WithoutSr;
    let run = || -> Result<BranchRun> {
        check_pair(input, gt)?;
        let half = downscale_half(&to_grayscale(input))?;
        let mask = binarize(&half, seg, stem)?;
        let gt_half = downscale_gt(gt)?;
        let metrics = metric_suite(&mask, &gt_half)?;
        Ok(BranchRun {
            branch,
            metrics,
            width: mask.width(),
            height: mask.height(),
            mask,
        })
    };
    run().map_err(annotate(branch, stem))
}

/// Enlarge the half-size document by 2, segment, and compare with the
/// original ground truth cropped to `(2*floor(W/2), 2*floor(H/2))`.
pub fn run_with_sr(
    input: &Raster,
    gt: &BinaryMask,
    sr: &dyn SuperResolver,
    seg: &dyn Binarizer,
    stem: &str,
) -> Result<BranchRun> {
    let branch = Branch::WithSr;
    let run = || -> Result<BranchRun> {
        check_pair(input, gt)?;
        if sr.scale() != PROTOCOL_SCALE {
            return Err(Error::InvalidScale(sr.scale()));
        }
        let half = downscale_half(&to_grayscale(input))?;
        let up = apply_sr(&half, sr, stem)?;
        let mask = binarize(&up, seg, stem)?;
        let gt_crop = gt.crop_top_left(mask.width(), mask.height())?;
        let metrics = metric_suite(&mask, &gt_crop)?;
        Ok(BranchRun {
            branch,
            metrics,
            width: mask.width(),
            height: mask.height(),
            mask,
        })
    };
    run().map_err(annotate(branch, stem))
}

/// Per-branch summary: arithmetic means over documents.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Aggregate {
    pub images: usize,
    /// Mean over finite values; `None` if every document had infinite PSNR.
    pub psnr_db: Option<f64>,
    pub infinite_psnr: usize,
    pub ssim: f64,
    pub f_measure: Option<f64>,
}

/// Means each metric over the reports in the given order. Infinite PSNR
/// values are counted separately and left out of the PSNR mean.
pub fn aggregate(reports: &[MetricReport]) -> Result<Aggregate> {
    if reports.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (mut psnr_sum, mut finite) = (0.0, 0usize);
    let (mut ssim_sum, mut fm_sum, mut fm_n) = (0.0, 0.0, 0usize);
    for r in reports {
        if let Some(db) = r.psnr_db {
            psnr_sum += db;
            finite += 1;
        }
        ssim_sum += r.ssim;
        if let Some(b) = &r.binary {
            fm_sum += b.f_measure;
            fm_n += 1;
        }
    }
    let n = reports.len();
    Ok(Aggregate {
        images: n,
        psnr_db: (finite > 0).then(|| psnr_sum / finite as f64),
        infinite_psnr: n - finite,
        ssim: ssim_sum / n as f64,
        f_measure: (fm_n > 0).then(|| fm_sum / fm_n as f64),
    })
}

/// `with_sr - without_sr` for each aggregate metric.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Deltas {
    pub psnr_db: Option<f64>,
    pub ssim: f64,
    pub f_measure: Option<f64>,
}

pub fn deltas(with_sr: &Aggregate, without_sr: &Aggregate) -> Deltas {
    let diff = |a: Option<f64>, b: Option<f64>| Some(a? - b?);
    Deltas {
        psnr_db: diff(with_sr.psnr_db, without_sr.psnr_db),
        ssim: with_sr.ssim - without_sr.ssim,
        f_measure: diff(with_sr.f_measure, without_sr.f_measure),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resample::KernelKind;
    use crate::stages::{ClassicalSeg, ClassicalSr};
    use alloc::vec;

    fn report(psnr: Option<f64>, ssim: f64) -> MetricReport {
        MetricReport {
            mse: if psnr.is_some() { 1.0 } else { 0.0 },
            psnr_db: psnr,
            ssim,
            binary: None,
        }
    }

    #[test]
    fn gt_blocks() {
        let block = |bits: [bool; 4]| {
            let m = BinaryMask::new(2, 2, bits.to_vec()).unwrap();
            downscale_gt(&m).unwrap().foreground()[0]
        };
        assert!(block([true; 4]));
        assert!(!block([false; 4]));
        assert!(!block([true, true, false, false]));
        assert!(!block([true, false, false, true]));
        assert!(block([true, true, true, false]));
        assert!(!block([false, false, false, true]));
        let odd = BinaryMask::new(3, 5, vec![true; 15]).unwrap();
        assert_eq!(downscale_gt(&odd).unwrap().dims(), (1, 2));
        assert!(downscale_gt(&BinaryMask::empty(1, 3)).is_err());
    }

    #[test]
    fn aggregate_rules() {
        let single = [report(Some(12.5), 0.75)];
        let a = aggregate(&single).unwrap();
        assert_eq!(
            (a.psnr_db, a.ssim, a.images, a.infinite_psnr),
            (Some(12.5), 0.75, 1, 0)
        );
        let a = aggregate(&[report(Some(10.0), 0.5), report(Some(20.0), 1.0)]).unwrap();
        assert_eq!(a.psnr_db, Some(15.0));
        let a = aggregate(&[report(Some(10.0), 0.5), report(None, 1.0)]).unwrap();
        assert_eq!((a.psnr_db, a.infinite_psnr), (Some(10.0), 1));
        let a = aggregate(&[report(None, 1.0)]).unwrap();
        assert_eq!(a.psnr_db, None);
        assert_eq!(aggregate(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn deltas_subtract() {
        let with = aggregate(&[report(Some(44.44), 0.9341)]).unwrap();
        let without = aggregate(&[report(Some(42.62), 0.8827)]).unwrap();
        let d = deltas(&with, &without);
        assert_eq!(d.psnr_db, Some(44.44 - 42.62));
        assert_eq!(d.ssim, 0.9341 - 0.8827);
        assert_eq!(d.f_measure, None);
    }

    #[test]
    fn blank_page_without_sr() {
        let input = Raster::filled(22, 22, 1, 255).unwrap();
        let gt = BinaryMask::empty(22, 22);
        let run = run_without_sr(&input, &gt, &ClassicalSeg::Otsu, "blank").unwrap();
        assert_eq!(run.metrics.binary.unwrap().f_measure, 1.0);
        assert_eq!((run.width, run.height), (11, 11));
    }

    #[test]
    fn odd_dimension_contracts() {
        let input = Raster::from_fn_gray(
            25,
            23,
            |x, y| if (x / 3 + y / 4) % 2 == 0 { 10 } else { 240 },
        )
        .unwrap();
        let gt =
            BinaryMask::new(25, 23, input.samples().iter().map(|&v| v < 128).collect()).unwrap();
        let sr = ClassicalSr::new(KernelKind::Bicubic, 2).unwrap();
        let seg = ClassicalSeg::Otsu;
        let a = run_without_sr(&input, &gt, &seg, "x").unwrap();
        assert_eq!((a.width, a.height), (12, 11));
        let b = run_with_sr(&input, &gt, &sr, &seg, "x").unwrap();
        assert_eq!((b.width, b.height), (24, 22));
    }

    #[test]
    fn errors_name_branch_and_id() {
        let input = Raster::filled(22, 22, 1, 255).unwrap();
        let gt = BinaryMask::empty(20, 22);
        match run_without_sr(&input, &gt, &ClassicalSeg::Otsu, "doc7") {
            Err(Error::Branch { branch, id, .. }) => {
                assert_eq!((branch, id.as_str()), ("without_sr", "doc7"));
            }
            other => panic!("{other:?}"),
        }
        let gt = BinaryMask::empty(22, 22);
        let err = run_with_sr(
            &input,
            &gt,
            &ClassicalSr::Identity,
            &ClassicalSeg::Otsu,
            "d",
        )
        .unwrap_err();
        assert!(alloc::format!("{err}").contains("with_sr"));
    }
}
