use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::config::{KernelPair, PipelineConfig, Smoothing, SweepSpec, ThresholdMethod};
use crate::error::{Error, Result};
use crate::imgproc::{apply_threshold, gaussian_blur, histogram, otsu_threshold, to_grayscale, OtsuResult, RgbImage};
use crate::morphology::{dilate, open, BinaryMask, StructuringElement};

/// Conditions that mark a mask for manual review.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskFlag {
    DegenerateHistogram,
    EmptyMask,
    FullMask,
}

impl fmt::Display for MaskFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaskFlag::DegenerateHistogram => "degenerate_histogram",
            MaskFlag::EmptyMask => "empty_mask",
            MaskFlag::FullMask => "full_mask",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskOutcome {
    pub mask: BinaryMask,
    /// Absent for global thresholds and degenerate histograms.
    pub otsu: Option<OtsuResult>,
    pub flags: BTreeSet<MaskFlag>,
    pub foreground_fraction: f64,
}

impl MaskOutcome {
    fn new(mask: BinaryMask, otsu: Option<OtsuResult>, degenerate: bool) -> Self {
        let foreground = mask.count_foreground();
        let total = mask.width() * mask.height();
        let mut flags = BTreeSet::new();
        if degenerate {
            flags.insert(MaskFlag::DegenerateHistogram);
        }
        if foreground == 0 {
            flags.insert(MaskFlag::EmptyMask);
        }
        if foreground == total {
            flags.insert(MaskFlag::FullMask);
        }
        Self {
            mask,
            otsu,
            flags,
            foreground_fraction: foreground as f64 / total as f64,
        }
    }

    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    /// Flags joined with `;`, empty when unflagged.
    pub fn flags_label(&self) -> String {
        self.flags
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Thresholded mask before any morphology.
struct RawMask {
    mask: BinaryMask,
    otsu: Option<OtsuResult>,
    degenerate: bool,
}

fn threshold_stage(img: &RgbImage, cfg: &PipelineConfig) -> Result<RawMask> {
    cfg.validate()?;
    let gray = to_grayscale(img);
    let gray = match cfg.smoothing {
        Smoothing::None => gray,
        Smoothing::Gaussian { sigma, kernel_side } => gaussian_blur(&gray, sigma, kernel_side)?,
    };
    let (threshold, otsu) = match cfg.threshold {
        ThresholdMethod::Global(value) => (value, None),
        ThresholdMethod::Otsu => match otsu_threshold(&histogram(&gray)) {
            Ok(r) => (r.threshold, Some(r)),
            Err(Error::DegenerateHistogram) => {
                return Ok(RawMask {
                    mask: BinaryMask::empty(gray.width(), gray.height()),
                    otsu: None,
                    degenerate: true,
                })
            }
            Err(e) => return Err(e),
        },
    };
    Ok(RawMask {
        mask: apply_threshold(&gray, threshold, cfg.polarity),
        otsu,
        degenerate: false,
    })
}

fn morphology_stage(cleaned: &BinaryMask, dilate_side: usize) -> BinaryMask {
    dilate(cleaned, StructuringElement::square(dilate_side))
}

/// Runs the full recipe. A constant image under Otsu yields an empty mask
/// carrying the degenerate flag rather than an error.
pub fn generate_mask(img: &RgbImage, cfg: &PipelineConfig) -> Result<MaskOutcome> {
    let raw = threshold_stage(img, cfg)?;
    let cleaned = open(&raw.mask, StructuringElement::square(cfg.clean_side));
    let mask = morphology_stage(&cleaned, cfg.dilate_side);
    Ok(MaskOutcome::new(mask, raw.otsu, raw.degenerate))
}

/// One outcome per pair, in sweep order. The threshold stage runs once and
/// openings are shared between pairs with the same clean side; results are
/// identical to calling [`generate_mask`] per pair.
pub fn run_sweep(img: &RgbImage, sweep: &SweepSpec) -> Result<Vec<(KernelPair, MaskOutcome)>> {
    let raw = threshold_stage(img, sweep.base())?;
    let mut openings: BTreeMap<usize, BinaryMask> = BTreeMap::new();
    let mut out = Vec::with_capacity(sweep.pairs().len());
    for &pair in sweep.pairs() {
        let cleaned = openings
            .entry(pair.clean)
            .or_insert_with(|| open(&raw.mask, StructuringElement::square(pair.clean)));
        let mask = morphology_stage(cleaned, pair.dilate);
        out.push((pair, MaskOutcome::new(mask, raw.otsu, raw.degenerate)));
    }
    Ok(out)
}
