//! lesionmask: shape-preserving skin-lesion masks from classical image
//! processing.
//!
//! grayscale -> optional Gaussian smoothing -> Otsu or global threshold ->
//! opening (clean) -> dilation, plus sweeps over kernel pairs, masked
//! dataset emission for ablation studies, and pixelwise segmentation
//! scoring (accuracy, sensitivity, specificity, precision, F1, Dice).
//!
//! All image operations are pure functions over in-memory rasters; file
//! I/O lives in [`pipeline::mask_io`], [`imgproc::RgbImage::open`], the
//! [`dataset`] module and the CLI.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod imgproc;
pub mod metrics;
pub mod morphology;
pub mod pipeline;

pub use error::{Error, Result};
pub use imgproc::{GrayImage, Polarity, RgbImage};
pub use morphology::{BinaryMask, StructuringElement};
pub use pipeline::{ApplicationMode, KernelPair, MaskOutcome, PipelineConfig, SweepSpec};
