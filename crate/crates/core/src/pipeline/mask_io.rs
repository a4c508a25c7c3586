//! Mask files: 8-bit grayscale PNG, 255 = foreground.

use std::path::Path;

use image::ColorType;

use crate::error::{Error, Result};
use crate::imgproc::luma;
use crate::imgproc::raster::{decode, encode_error};
use crate::morphology::BinaryMask;

pub const DEFAULT_IMPORT_THRESHOLD: u8 = 127;

pub fn export_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let samples: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    image::save_buffer_with_format(
        path,
        &samples,
        mask.width() as u32,
        mask.height() as u32,
        image::ExtendedColorType::L8,
        image::ImageFormat::Png,
    )
    .map_err(|source| encode_error(path, source))
}

/// Reads a grayscale or RGB image; a pixel is foreground iff its luminance
/// exceeds `threshold`.
pub fn import_mask(path: impl AsRef<Path>, threshold: u8) -> Result<BinaryMask> {
    let path = path.as_ref();
    let decoded = decode(path)?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let bits: Vec<bool> = match decoded.color() {
        ColorType::L8 => decoded
            .into_luma8()
            .into_raw()
            .into_iter()
            .map(|v| v > threshold)
            .collect(),
        ColorType::Rgb8 => decoded
            .into_rgb8()
            .into_raw()
            .chunks_exact(3)
            .map(|p| luma(p[0], p[1], p[2]) > threshold)
            .collect(),
        ColorType::La8 | ColorType::Rgba8 | ColorType::La16 | ColorType::Rgba16 => {
            return Err(Error::AlphaChannel { path: path.into() })
        }
        other => {
            return Err(Error::UnsupportedPixelFormat {
                path: path.into(),
                format: format!("{other:?}"),
            })
        }
    };
    BinaryMask::from_bits(w, h, bits)
}
