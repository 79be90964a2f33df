//! Dataset manifests pairing each input document with its ground truth.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrbinError};
use crate::image_io::{write_atomic, ImageFormat};

pub const DEFAULT_GT_SUFFIXES: [&str; 1] = ["_gt"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub input_path: PathBuf,
    pub gt_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub dataset_name: String,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Sorts entries by id and checks ids are unique and non-empty.
    pub fn new(dataset_name: impl Into<String>, mut entries: Vec<ManifestEntry>) -> Result<Self> {
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        let mut seen = HashSet::new();
        for e in &entries {
            if e.id.is_empty() {
                return Err(SrbinError::InvalidManifest("empty entry id".into()));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(SrbinError::InvalidManifest(format!(
                    "duplicate id '{}'",
                    e.id
                )));
            }
        }
        Ok(Self {
            dataset_name: dataset_name.into(),
            entries,
        })
    }

    /// Reads a manifest file. Relative paths resolve against the manifest's
    /// directory; every referenced file must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| SrbinError::io(path, e))?;
        let raw: Manifest = serde_json::from_str(&text).map_err(|source| SrbinError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        let entries = raw
            .entries
            .into_iter()
            .map(|e| ManifestEntry {
                id: e.id,
                input_path: resolve(e.input_path),
                gt_path: resolve(e.gt_path),
            })
            .collect();
        let manifest = Manifest::new(raw.dataset_name, entries)?;
        for e in &manifest.entries {
            for p in [&e.input_path, &e.gt_path] {
                if !p.is_file() {
                    return Err(SrbinError::InvalidManifest(format!(
                        "entry '{}': {} does not exist",
                        e.id,
                        p.display()
                    )));
                }
            }
        }
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }
}

/// Result of scanning a directory: the pairs found plus human-readable notes
/// on files that could not be paired.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub manifest: Manifest,
    pub unpaired: Vec<String>,
}

fn ends_with_ci(s: &str, suffix: &str) -> Option<usize> {
    let cut = s.len().checked_sub(suffix.len())?;
    (s.is_char_boundary(cut) && s[cut..].eq_ignore_ascii_case(suffix)).then_some(cut)
}

/// Pairs `<stem>.<ext>` inputs with `<stem><suffix>.<ext2>` ground truths in
/// `dir` (non-recursive). The suffix match is case-insensitive and the two
/// extensions may differ; only PNG/PGM/PPM files are considered.
pub fn scan_dataset(dir: &Path, gt_suffix: Option<&str>) -> Result<Scan> {
    let read = fs::read_dir(dir).map_err(|e| SrbinError::io(dir, e))?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in read {
        let path = entry.map_err(|e| SrbinError::io(dir, e))?.path();
        if path.is_file() && ImageFormat::from_path(&path).is_some() {
            files.push(path);
        }
    }
    files.sort();

    let suffixes: Vec<&str> = match gt_suffix {
        Some(s) => vec![s],
        None => DEFAULT_GT_SUFFIXES.to_vec(),
    };
    let file_name = |p: &Path| {
        p.file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned()
    };

    let mut inputs: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut gts: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut unpaired = Vec::new();
    for path in files {
        let stem = path
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        let gt_id = suffixes
            .iter()
            .find_map(|s| ends_with_ci(&stem, s))
            .map(|cut| &stem[..cut]);
        let (bucket, id) = match gt_id {
            Some(id) if !id.is_empty() => (&mut gts, id.to_string()),
            _ => (&mut inputs, stem.clone()),
        };
        if let Some(prev) = bucket.get(&id) {
            unpaired.push(format!(
                "{} ignored: {} already claims id '{id}'",
                file_name(&path),
                file_name(prev)
            ));
        } else {
            bucket.insert(id, path);
        }
    }

    let mut entries = Vec::new();
    for (id, input_path) in inputs {
        match gts.remove(&id) {
            Some(gt_path) => entries.push(ManifestEntry {
                id,
                input_path,
                gt_path,
            }),
            None => unpaired.push(format!("{} unpaired", file_name(&input_path))),
        }
    }
    for gt in gts.values() {
        unpaired.push(format!("{} has no matching input", file_name(gt)));
    }

    if entries.is_empty() {
        return Err(SrbinError::EmptyDataset {
            dir: dir.to_path_buf(),
            diagnostics: unpaired,
        });
    }
    let name = dir
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "dataset".to_string());
    Ok(Scan {
        manifest: Manifest::new(name, entries)?,
        unpaired,
    })
}
