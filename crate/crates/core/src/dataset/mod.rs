//! Metadata ingestion, relabeling, manifests and masked-dataset emission.

pub mod emit;
pub mod manifest;
pub mod mapping;
pub mod metadata;

pub use emit::{applied_path, emit_dataset, mask_path, EmissionSummary, LabelRow, LABELS_FILE, MASK_DIR};
pub use manifest::{build_manifest, label_counts, read_manifest, write_manifest, ManifestRecord, ManifestSummary};
pub use mapping::{map_diagnosis, BinaryLabel, DiagnosisMapping, KNOWN_DX};
pub use metadata::{load_metadata, MetadataLoad, MetadataRecord, RowError};
