//! Mask recipes, sweeps over kernel pairs, and mask application.

pub mod apply;
pub mod config;
pub mod generate;
pub mod mask_io;

pub use apply::{apply_mask, ApplicationMode};
pub use config::{KernelPair, PipelineConfig, Smoothing, SweepSpec, ThresholdMethod, KERNEL_GRID, TABLE_PAIRS};
pub use generate::{generate_mask, run_sweep, MaskFlag, MaskOutcome};
pub use mask_io::{export_mask, import_mask, DEFAULT_IMPORT_THRESHOLD};
