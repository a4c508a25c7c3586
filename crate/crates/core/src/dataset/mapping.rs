//! Diagnosis code to benign/malignant relabeling.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven HAM10000 diagnosis codes.
pub const KNOWN_DX: [&str; 7] = ["akiec", "bcc", "bkl", "df", "mel", "nv", "vasc"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinaryLabel {
    Benign,
    Malignant,
}

impl BinaryLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BinaryLabel::Benign => "benign",
            BinaryLabel::Malignant => "malignant",
        }
    }
}

impl fmt::Display for BinaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BinaryLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "benign" => Ok(BinaryLabel::Benign),
            "malignant" => Ok(BinaryLabel::Malignant),
            _ => Err(Error::InvalidLabel(s.to_string())),
        }
    }
}

pub fn normalize_dx(dx: &str) -> String {
    dx.trim().to_ascii_lowercase()
}

/// dx code -> binary label. Always covers the seven known codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosisMapping {
    entries: BTreeMap<String, BinaryLabel>,
}

impl Default for DiagnosisMapping {
    /// akiec, bcc and mel are malignant; bkl, df, nv and vasc benign.
    fn default() -> Self {
        use BinaryLabel::*;
        let entries = [
            ("akiec", Malignant),
            ("bcc", Malignant),
            ("mel", Malignant),
            ("bkl", Benign),
            ("df", Benign),
            ("nv", Benign),
            ("vasc", Benign),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self { entries }
    }
}

impl DiagnosisMapping {
    /// Builds a mapping from explicit entries. Codes are case-insensitive;
    /// extra codes are allowed but all seven known codes must be present.
    pub fn new(entries: impl IntoIterator<Item = (String, BinaryLabel)>) -> Result<Self> {
        let entries: BTreeMap<String, BinaryLabel> = entries.into_iter().map(|(k, v)| (normalize_dx(&k), v)).collect();
        let missing: Vec<String> = KNOWN_DX
            .iter()
            .filter(|dx| !entries.contains_key(**dx))
            .map(|dx| dx.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::IncompleteMapping(missing));
        }
        Ok(Self { entries })
    }

    /// Reads a two-column `dx,label` CSV. A header row is optional.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let mut entries = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| Error::csv(path, e))?;
            let (dx, label) = match (row.get(0), row.get(1), row.len()) {
                (Some(dx), Some(label), 2) => (dx, label),
                _ => {
                    return Err(Error::Config(format!(
                        "{}: line {}: expected two columns dx,label",
                        path.display(),
                        i + 1
                    )))
                }
            };
            if i == 0 && dx.eq_ignore_ascii_case("dx") && label.eq_ignore_ascii_case("label") {
                continue;
            }
            entries.push((dx.to_string(), label.parse()?));
        }
        Self::new(entries)
    }

    pub fn get(&self, dx: &str) -> Option<BinaryLabel> {
        self.entries.get(&normalize_dx(dx)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, BinaryLabel)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub fn map_diagnosis(dx: &str, mapping: &DiagnosisMapping) -> Result<BinaryLabel> {
    mapping.get(dx).ok_or_else(|| Error::UnknownDiagnosis(dx.to_string()))
}
