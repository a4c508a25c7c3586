use serde::{Deserialize, Serialize};

use super::raster::GrayImage;
use crate::morphology::BinaryMask;

/// Which side of the threshold counts as foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Foreground is `intensity <= threshold`. Lesions are darker than skin.
    #[default]
    DarkForeground,
    /// Foreground is `intensity > threshold`.
    LightForeground,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::DarkForeground => Polarity::LightForeground,
            Polarity::LightForeground => Polarity::DarkForeground,
        }
    }
}

pub fn apply_threshold(img: &GrayImage, threshold: u8, polarity: Polarity) -> BinaryMask {
    let bits = img
        .pixels()
        .iter()
        .map(|&v| match polarity {
            Polarity::DarkForeground => v <= threshold,
            Polarity::LightForeground => v > threshold,
        })
        .collect();
    BinaryMask::from_bits(img.width(), img.height(), bits)
        .expect("gray image dimensions are valid")
}
