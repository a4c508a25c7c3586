//! HAM10000-style metadata CSV ingestion.

use std::path::Path;

use serde::Serialize;

use super::mapping::{normalize_dx, KNOWN_DX};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetadataRecord {
    pub lesion_id: String,
    pub image_id: String,
    /// Lower-cased diagnosis code.
    pub dx: String,
    pub dx_type: String,
    pub age: String,
    pub sex: String,
    pub localization: String,
}

impl MetadataRecord {
    pub fn has_known_dx(&self) -> bool {
        KNOWN_DX.contains(&self.dx.as_str())
    }
}

/// A data row that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct MetadataLoad {
    pub records: Vec<MetadataRecord>,
    pub errors: Vec<RowError>,
}

impl MetadataLoad {
    /// Records whose dx is outside the seven known codes.
    pub fn unknown_dx(&self) -> impl Iterator<Item = &MetadataRecord> {
        self.records.iter().filter(|r| !r.has_known_dx())
    }
}

const REQUIRED: [&str; 3] = ["lesion_id", "image_id", "dx"];
const OPTIONAL: [&str; 4] = ["dx_type", "age", "sex", "localization"];

/// Parses a metadata CSV with a header row. Missing required columns fail
/// the load; malformed rows are collected with their line numbers.
pub fn load_metadata(path: impl AsRef<Path>) -> Result<MetadataLoad> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));

    let mut required = [0usize; 3];
    for (slot, name) in required.iter_mut().zip(REQUIRED) {
        *slot = column(name).ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let optional = OPTIONAL.map(column);

    let mut load = MetadataLoad::default();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                load.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != headers.len() {
            load.errors.push(RowError {
                line,
                message: format!("expected {} fields, found {}", headers.len(), row.len()),
            });
            continue;
        }
        let [lesion_id, image_id, dx] = required.map(|i| row[i].to_string());
        if image_id.is_empty() || dx.is_empty() {
            load.errors.push(RowError {
                line,
                message: "empty image_id or dx".to_string(),
            });
            continue;
        }
        let [dx_type, age, sex, localization] = optional.map(|i| i.map(|i| row[i].to_string()).unwrap_or_default());
        load.records.push(MetadataRecord {
            lesion_id,
            image_id,
            dx: normalize_dx(&dx),
            dx_type,
            age,
            sex,
            localization,
        });
    }
    Ok(load)
}
