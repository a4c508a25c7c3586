use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgproc::RgbImage;
use crate::morphology::BinaryMask;

/// How a mask is combined with its source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApplicationMode {
    /// White lesion on black; the RGB content is discarded.
    #[serde(rename = "maskonly")]
    MaskOnly,
    /// Lesion pixels blacked out, surrounding skin kept.
    #[serde(rename = "ablate")]
    AblateLesion,
    /// Lesion pixels kept, everything else black.
    #[serde(rename = "isolate")]
    IsolateLesion,
}

impl ApplicationMode {
    pub const ALL: [ApplicationMode; 3] = [
        ApplicationMode::MaskOnly,
        ApplicationMode::AblateLesion,
        ApplicationMode::IsolateLesion,
    ];

    /// Directory and command-line name.
    pub fn as_str(&self) -> &'static str {
        match self {
            ApplicationMode::MaskOnly => "maskonly",
            ApplicationMode::AblateLesion => "ablate",
            ApplicationMode::IsolateLesion => "isolate",
        }
    }
}

impl fmt::Display for ApplicationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ApplicationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown mode {s:?}: expected maskonly, ablate or isolate")))
    }
}

pub fn apply_mask(img: &RgbImage, mask: &BinaryMask, mode: ApplicationMode) -> Result<RgbImage> {
    if img.dimensions() != mask.dimensions() {
        return Err(Error::DimensionMismatch {
            left: img.dimensions(),
            right: mask.dimensions(),
        });
    }
    const BLACK: [u8; 3] = [0, 0, 0];
    const WHITE: [u8; 3] = [255, 255, 255];
    let mut pixels = Vec::with_capacity(img.pixels().len());
    for (src, &lesion) in img.pixels().chunks_exact(3).zip(mask.bits()) {
        let keep = match mode {
            ApplicationMode::MaskOnly => {
                pixels.extend_from_slice(if lesion { &WHITE } else { &BLACK });
                continue;
            }
            ApplicationMode::AblateLesion => !lesion,
            ApplicationMode::IsolateLesion => lesion,
        };
        pixels.extend_from_slice(if keep { src } else { &BLACK });
    }
    RgbImage::new(img.width(), img.height(), pixels)
}
