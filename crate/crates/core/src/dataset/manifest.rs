//! Joining metadata to image files on disk.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::mapping::{BinaryLabel, DiagnosisMapping};
use super::metadata::MetadataRecord;
use crate::error::{Error, Result};

const IMAGE_EXTENSIONS: [&str; 4] = ["jpg", "jpeg", "png", "JPG"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub image_id: String,
    pub path: PathBuf,
    pub label: BinaryLabel,
    pub dx: String,
    #[serde(default, deserialize_with = "empty_as_none")]
    pub truth: Option<PathBuf>,
}

fn empty_as_none<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<PathBuf>, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    Ok(s.filter(|s| !s.is_empty()).map(PathBuf::from))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ManifestSummary {
    /// image_ids with no matching image file.
    pub missing: Vec<String>,
    /// image_ids seen more than once in the metadata; only the first is kept.
    pub duplicates: Vec<String>,
    /// (image_id, dx) rows whose dx has no mapping entry.
    pub unmapped: Vec<(String, String)>,
    pub label_counts: BTreeMap<BinaryLabel, usize>,
}

impl ManifestSummary {
    pub fn count(&self, label: BinaryLabel) -> usize {
        self.label_counts.get(&label).copied().unwrap_or(0)
    }
}

fn find_file(dir: &Path, stems: &[String]) -> Option<PathBuf> {
    stems.iter().find_map(|stem| {
        IMAGE_EXTENSIONS
            .iter()
            .map(|ext| dir.join(format!("{stem}.{ext}")))
            .find(|p| p.is_file())
    })
}

/// Joins records to `<image_id>.{jpg,jpeg,png}` in `image_dir` and, when a
/// truth directory is given, to `<image_id>.png` or
/// `<image_id>_segmentation.png` there. Output is sorted by image_id.
pub fn build_manifest(
    records: &[MetadataRecord],
    image_dir: &Path,
    truth_dir: Option<&Path>,
    mapping: &DiagnosisMapping,
) -> Result<(Vec<ManifestRecord>, ManifestSummary)> {
    if !image_dir.is_dir() {
        return Err(Error::io(
            image_dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "image directory not found"),
        ));
    }
    let mut summary = ManifestSummary::default();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for rec in records {
        if !seen.insert(rec.image_id.as_str()) {
            summary.duplicates.push(rec.image_id.clone());
            continue;
        }
        let Some(label) = mapping.get(&rec.dx) else {
            summary.unmapped.push((rec.image_id.clone(), rec.dx.clone()));
            continue;
        };
        let Some(path) = find_file(image_dir, std::slice::from_ref(&rec.image_id)) else {
            summary.missing.push(rec.image_id.clone());
            continue;
        };
        let truth = truth_dir.and_then(|dir| {
            find_file(
                dir,
                &[rec.image_id.clone(), format!("{}_segmentation", rec.image_id)],
            )
        });
        *summary.label_counts.entry(label).or_default() += 1;
        rows.push(ManifestRecord {
            image_id: rec.image_id.clone(),
            path,
            label,
            dx: rec.dx.clone(),
            truth,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyJoin(image_dir.to_path_buf()));
    }
    rows.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    summary.missing.sort();
    Ok((rows, summary))
}

/// Writes `image_id,path,label,dx,truth`.
pub fn write_manifest(rows: &[ManifestRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a manifest CSV. Relative paths are resolved against the
/// manifest's own directory.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRecord>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.deserialize() {
        let mut r: ManifestRecord = row.map_err(|e| Error::csv(path, e))?;
        if !seen.insert(r.image_id.clone()) {
            return Err(Error::Config(format!("{}: duplicate image_id {}", path.display(), r.image_id)));
        }
        if r.path.is_relative() {
            r.path = base.join(&r.path);
        }
        if let Some(t) = r.truth.as_mut().filter(|t| t.is_relative()) {
            *t = base.join(&*t);
        }
        rows.push(r);
    }
    Ok(rows)
}

/// Per-label counts over a manifest.
pub fn label_counts(rows: &[ManifestRecord]) -> BTreeMap<BinaryLabel, usize> {
    let mut counts = BTreeMap::new();
    for r in rows {
        *counts.entry(r.label).or_default() += 1;
    }
    counts
}
