//! Runs the with/without super-resolution comparison over a manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use srbin_core::metrics::{MetricReport, SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW};
use srbin_core::protocol::{
    aggregate, deltas, run_with_sr, run_without_sr, Aggregate, Branch, BranchRun, Deltas,
    PROTOCOL_SCALE,
};
use srbin_core::raster::{mask_from_raster, to_grayscale, GT_THRESHOLD};
use srbin_core::stages::SuperResolver;

use crate::error::{Result, SrbinError};
use crate::image_io::{load_image, write_atomic};
use crate::manifest::{Manifest, ManifestEntry};
use crate::stages::{SegSpec, SrSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sr: SrSpec,
    pub seg: SegSpec,
    pub branches: Vec<Branch>,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(sr: SrSpec, seg: SegSpec) -> Self {
        Self {
            sr,
            seg,
            branches: Branch::BOTH.to_vec(),
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.branches.is_empty() {
            return Err(SrbinError::ConfigInvalid("no branches selected".into()));
        }
        if self.branches.contains(&Branch::WithSr) && self.sr.scale() != PROTOCOL_SCALE {
            return Err(SrbinError::ConfigInvalid(format!(
                "with_sr requires a x{PROTOCOL_SCALE} SR stage, got '{}'",
                self.sr
            )));
        }
        if self.threads == Some(0) {
            return Err(SrbinError::ConfigInvalid(
                "thread count must be positive".into(),
            ));
        }
        Ok(())
    }

    fn branches(&self) -> Vec<Branch> {
        let mut b = self.branches.clone();
        b.sort();
        b.dedup();
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimSettings {
    pub window: usize,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
    pub peak: f64,
}

/// Everything needed to interpret the numbers in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub sr: SrSpec,
    pub seg: SegSpec,
    pub branches: Vec<Branch>,
    pub input_downscale: String,
    pub gt_downscale: String,
    pub with_sr_reference: String,
    pub gt_threshold: u8,
    pub psnr: String,
    pub ssim: SsimSettings,
    pub aggregation: String,
}

impl ConfigEcho {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            sr: cfg.sr.clone(),
            seg: cfg.seg.clone(),
            branches: cfg.branches(),
            input_downscale: "grayscale (BT.601), then 2x2 box mean, round half up, odd edge dropped".into(),
            gt_downscale: "2x2 block is text iff >= 3 text pixels; ties to background".into(),
            with_sr_reference: "original ground truth cropped top-left to even size".into(),
            gt_threshold: GT_THRESHOLD,
            psnr: "peak 255 on 0/255 renders of the masks".into(),
            ssim: SsimSettings {
                window: SSIM_WINDOW,
                sigma: SSIM_SIGMA,
                c1: SSIM_C1,
                c2: SSIM_C2,
                peak: 255.0,
            },
            aggregation: "per-image arithmetic mean in id order; infinite PSNR excluded from the mean and counted".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchResult {
    pub width: u32,
    pub height: u32,
    pub metrics: MetricReport,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub results: BTreeMap<Branch, BranchResult>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub errors: BTreeMap<Branch, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset_name: String,
    pub config: ConfigEcho,
    pub per_image: BTreeMap<String, EntryReport>,
    pub aggregates: BTreeMap<Branch, Aggregate>,
    /// `with_sr - without_sr`, present when both branches have aggregates.
    pub deltas: Option<Deltas>,
    /// Entries left out of each branch's aggregate because they failed.
    pub excluded: BTreeMap<Branch, usize>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| SrbinError::io(path, e))?;
        Self::from_json(&text).map_err(|source| SrbinError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    /// Builds aggregates, deltas and exclusion counts from per-image results.
    pub fn from_entries(
        dataset_name: String,
        config: ConfigEcho,
        per_image: BTreeMap<String, EntryReport>,
    ) -> Self {
        let mut aggregates = BTreeMap::new();
        let mut excluded = BTreeMap::new();
        for &branch in &config.branches {
            let reports: Vec<MetricReport> = per_image
                .values()
                .filter_map(|e| e.results.get(&branch).map(|r| r.metrics))
                .collect();
            excluded.insert(branch, per_image.len() - reports.len());
            if let Ok(agg) = aggregate(&reports) {
                aggregates.insert(branch, agg);
            }
        }
        let deltas = match (
            aggregates.get(&Branch::WithSr),
            aggregates.get(&Branch::WithoutSr),
        ) {
            (Some(w), Some(wo)) => Some(deltas(w, wo)),
            _ => None,
        };
        Self {
            dataset_name,
            config,
            per_image,
            aggregates,
            deltas,
            excluded,
        }
    }
}

/// Full-resolution input and decoded ground truth of one manifest entry.
fn load_entry(entry: &ManifestEntry) -> Result<(srbin_core::Raster, srbin_core::BinaryMask)> {
    let input = load_image(&entry.input_path)?;
    let gt_img = to_grayscale(&load_image(&entry.gt_path)?);
    let gt = mask_from_raster(&gt_img, GT_THRESHOLD)?;
    Ok((input, gt))
}

fn run_entry(entry: &ManifestEntry, cfg: &ExperimentConfig, branches: &[Branch]) -> EntryReport {
    let mut report = EntryReport::default();
    let (input, gt) = match load_entry(entry) {
        Ok(pair) => pair,
        Err(e) => {
            for &b in branches {
                report.errors.insert(b, format!("[{b}] {}: {e}", entry.id));
            }
            return report;
        }
    };
    for &branch in branches {
        let run: srbin_core::Result<BranchRun> = match branch {
            Branch::WithSr => run_with_sr(&input, &gt, &cfg.sr, &cfg.seg, &entry.id),
            Branch::WithoutSr => run_without_sr(&input, &gt, &cfg.seg, &entry.id),
        };
        match run {
            Ok(r) => {
                report.results.insert(
                    branch,
                    BranchResult {
                        width: r.width,
                        height: r.height,
                        metrics: r.metrics,
                    },
                );
            }
            Err(e) => {
                report.errors.insert(branch, e.to_string());
            }
        }
    }
    report
}

/// Runs every requested branch for every entry. Per-entry failures are kept
/// in the report and excluded from aggregates; the run fails only if nothing
/// succeeded. Output does not depend on the thread count.
pub fn run_experiment(manifest: &Manifest, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if manifest.entries.is_empty() {
        return Err(SrbinError::ConfigInvalid("manifest has no entries".into()));
    }
    let branches = cfg.branches();
    let work = || -> Vec<(String, EntryReport)> {
        manifest
            .entries
            .par_iter()
            .map(|e| (e.id.clone(), run_entry(e, cfg, &branches)))
            .collect()
    };
    let results = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SrbinError::ConfigInvalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    if results.iter().all(|(_, r)| r.results.is_empty()) {
        let first = results
            .iter()
            .find_map(|(_, r)| r.errors.values().next().cloned())
            .unwrap_or_default();
        return Err(SrbinError::AllEntriesFailed {
            count: results.len(),
            first,
        });
    }
    let per_image: BTreeMap<String, EntryReport> = results.into_iter().collect();
    Ok(ExperimentReport::from_entries(
        manifest.dataset_name.clone(),
        ConfigEcho::from_config(cfg),
        per_image,
    ))
}
