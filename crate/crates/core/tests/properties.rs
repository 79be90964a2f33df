use proptest::prelude::*;
use srbin_core::metrics::{f_measure, psnr, ssim};
use srbin_core::protocol::{downscale_gt, run_with_sr};
use srbin_core::raster::{mask_from_raster, raster_from_mask};
use srbin_core::resample::{resample, upscale, KernelKind};
use srbin_core::stages::{binarize, ClassicalSeg, ClassicalSr};
use srbin_core::{BinaryMask, Raster};

fn gray_pair(w: u32, h: u32) -> impl Strategy<Value = (Raster, Raster)> {
    let n = (w * h) as usize;
    (
        proptest::collection::vec(any::<u8>(), n),
        proptest::collection::vec(any::<u8>(), n),
    )
        .prop_map(move |(a, b)| {
            (
                Raster::new(w, h, 1, a).unwrap(),
                Raster::new(w, h, 1, b).unwrap(),
            )
        })
}

fn mask(w: u32, h: u32) -> impl Strategy<Value = BinaryMask> {
    proptest::collection::vec(any::<bool>(), (w * h) as usize)
        .prop_map(move |v| BinaryMask::new(w, h, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_symmetric((a, b) in gray_pair(14, 12)) {
        let (p1, p2) = (psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        prop_assert_eq!(p1.mse, p2.mse);
        if let (Some(x), Some(y)) = (p1.db, p2.db) {
            prop_assert!((x - y).abs() <= 1e-12);
            prop_assert!(x >= 0.0);
        }
        let (s1, s2) = (ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        prop_assert!((s1 - s2).abs() <= 1e-12);
        prop_assert!((-1.0..=1.0).contains(&s1));
        prop_assert_eq!(ssim(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn psnr_never_rises_with_more_disagreement(gt in mask(12, 12), order in Just(()).prop_perturb(|_, mut rng| {
        let mut idx: Vec<usize> = (0..144).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, (rng.next_u32() as usize) % (i + 1));
        }
        idx
    })) {
        let mut pred = gt.foreground().to_vec();
        let mut last_mse = 0.0;
        for &i in order.iter().take(40) {
            pred[i] = !pred[i];
            let p = BinaryMask::new(12, 12, pred.clone()).unwrap();
            let r = psnr(&raster_from_mask(&p), &raster_from_mask(&gt)).unwrap();
            prop_assert!(r.mse > last_mse);
            last_mse = r.mse;
        }
    }

    #[test]
    fn f_measure_permutation_invariant(p in mask(9, 7), g in mask(9, 7), seed: u64) {
        let mut idx: Vec<usize> = (0..63).collect();
        let mut s = seed;
        for i in (1..idx.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, ((s >> 33) as usize) % (i + 1));
        }
        let perm = |m: &BinaryMask| {
            BinaryMask::new(9, 7, idx.iter().map(|&i| m.foreground()[i]).collect()).unwrap()
        };
        prop_assert_eq!(f_measure(&p, &g).unwrap(), f_measure(&perm(&p), &perm(&g)).unwrap());
    }

    #[test]
    fn gt_downscale_agrees_with_render_and_box(m in mask(10, 8)) {
        // Mean of the 0/255 render below 127.5 iff at least 3 of 4 are text.
        let render = raster_from_mask(&m);
        let down = downscale_gt(&m).unwrap();
        for y in 0..4 {
            for x in 0..5 {
                let s: u32 = [(0, 0), (1, 0), (0, 1), (1, 1)]
                    .iter()
                    .map(|&(dx, dy)| render.get(2 * x + dx, 2 * y + dy, 0) as u32)
                    .sum();
                prop_assert_eq!(down.get(x, y), (s as f64) / 4.0 < 127.5);
            }
        }
    }

    #[test]
    fn nearest_with_sr_matches_full_resolution_otsu(
        half in proptest::collection::vec(any::<u8>(), 8 * 7),
        gt in mask(16, 14),
    ) {
        // Block-constant input: every 2x2 block shares one value.
        let small = Raster::new(8, 7, 1, half).unwrap();
        let input = upscale(&small, 2, KernelKind::Nearest).unwrap();
        let sr = ClassicalSr::new(KernelKind::Nearest, 2).unwrap();
        let run = run_with_sr(&input, &gt, &sr, &ClassicalSeg::Otsu, "x").unwrap();
        let direct = binarize(&input, &ClassicalSeg::Otsu, "x").unwrap();
        prop_assert_eq!(run.mask, direct);
        prop_assert_eq!(resample(&input, 8, 7, KernelKind::Nearest).unwrap(), small);
    }
}

#[test]
fn with_sr_even_dims_compare_at_full_size() {
    let input =
        Raster::from_fn_gray(32, 24, |x, y| if (x + y) % 7 < 2 { 20 } else { 235 }).unwrap();
    let gt = mask_from_raster(&input, 128).unwrap();
    let sr = ClassicalSr::new(KernelKind::Bilinear, 2).unwrap();
    let run = run_with_sr(&input, &gt, &sr, &ClassicalSeg::sauvola(), "x").unwrap();
    assert_eq!((run.width, run.height), (32, 24));
}
