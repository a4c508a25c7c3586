//! Writing masked datasets for every (image, kernel pair) combination.
//!
//! Layout under the output directory:
//!
//! ```text
//! <dilate>_<clean>/masks/<image_id>.png     raw mask, 255 = lesion
//! <dilate>_<clean>/<mode>/<image_id>.png    mask applied to the RGB image
//! labels.csv                                 image_id,label,dilate,clean,mode,flags
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::mapping::BinaryLabel;
use super::manifest::ManifestRecord;
use crate::error::{Error, Result};
use crate::imgproc::RgbImage;
use crate::pipeline::{apply_mask, export_mask, run_sweep, ApplicationMode, KernelPair, SweepSpec};

pub const MASK_DIR: &str = "masks";
pub const LABELS_FILE: &str = "labels.csv";

pub fn pair_dir(out: &Path, pair: KernelPair) -> PathBuf {
    out.join(pair.to_string())
}

pub fn mask_path(out: &Path, pair: KernelPair, image_id: &str) -> PathBuf {
    pair_dir(out, pair).join(MASK_DIR).join(format!("{image_id}.png"))
}

pub fn applied_path(out: &Path, pair: KernelPair, mode: ApplicationMode, image_id: &str) -> PathBuf {
    pair_dir(out, pair).join(mode.as_str()).join(format!("{image_id}.png"))
}

/// One labels.csv row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRow {
    pub image_id: String,
    pub label: BinaryLabel,
    pub pair: KernelPair,
    pub mode: ApplicationMode,
    /// `;`-joined mask flags, or `error` when the item failed.
    pub flags: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmissionSummary {
    pub rows: Vec<LabelRow>,
    /// (image_id, message) for images that could not be processed.
    pub failures: Vec<(String, String)>,
    /// Masks written per pair.
    pub written: BTreeMap<KernelPair, usize>,
    /// Items carrying any flag, per pair.
    pub flagged: BTreeMap<KernelPair, usize>,
}

impl EmissionSummary {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty() && self.flagged.values().all(|&n| n == 0)
    }
}

fn process(record: &ManifestRecord, sweep: &SweepSpec, mode: ApplicationMode, out: &Path) -> Result<Vec<(KernelPair, String)>> {
    let img = RgbImage::open(&record.path)?;
    let mut flags = Vec::with_capacity(sweep.pairs().len());
    for (pair, outcome) in run_sweep(&img, sweep)? {
        export_mask(&outcome.mask, mask_path(out, pair, &record.image_id))?;
        let applied = apply_mask(&img, &outcome.mask, mode)?;
        applied.save_png(applied_path(out, pair, mode, &record.image_id))?;
        flags.push((pair, outcome.flags_label()));
    }
    Ok(flags)
}

/// Emits every manifest row under every pair of `sweep`. Items run in
/// parallel on the current rayon pool; failures are recorded and do not
/// stop the batch. labels.csv is written last, in manifest order.
pub fn emit_dataset(
    manifest: &[ManifestRecord],
    sweep: &SweepSpec,
    mode: ApplicationMode,
    out: &Path,
) -> Result<EmissionSummary> {
    for &pair in sweep.pairs() {
        for sub in [MASK_DIR, mode.as_str()] {
            let dir = pair_dir(out, pair).join(sub);
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }

    let results: Vec<_> = manifest
        .par_iter()
        .map(|record| process(record, sweep, mode, out))
        .collect();

    let mut summary = EmissionSummary::default();
    for &pair in sweep.pairs() {
        summary.written.insert(pair, 0);
        summary.flagged.insert(pair, 0);
    }
    for (record, result) in manifest.iter().zip(results) {
        match result {
            Ok(per_pair) => {
                for (pair, flags) in per_pair {
                    *summary.written.entry(pair).or_default() += 1;
                    if !flags.is_empty() {
                        *summary.flagged.entry(pair).or_default() += 1;
                    }
                    summary.rows.push(LabelRow {
                        image_id: record.image_id.clone(),
                        label: record.label,
                        pair,
                        mode,
                        flags,
                    });
                }
            }
            Err(e) => {
                summary.failures.push((record.image_id.clone(), e.to_string()));
                for &pair in sweep.pairs() {
                    summary.rows.push(LabelRow {
                        image_id: record.image_id.clone(),
                        label: record.label,
                        pair,
                        mode,
                        flags: "error".to_string(),
                    });
                }
            }
        }
    }

    let labels = out.join(LABELS_FILE);
    let mut w = csv::Writer::from_path(&labels).map_err(|e| Error::csv(&labels, e))?;
    w.write_record(["image_id", "label", "dilate", "clean", "mode", "flags"])
        .map_err(|e| Error::csv(&labels, e))?;
    for r in &summary.rows {
        w.write_record([
            r.image_id.as_str(),
            r.label.as_str(),
            &r.pair.dilate.to_string(),
            &r.pair.clean.to_string(),
            r.mode.as_str(),
            &r.flags,
        ])
        .map_err(|e| Error::csv(&labels, e))?;
    }
    w.flush().map_err(|e| Error::io(&labels, e))?;
    Ok(summary)
}
