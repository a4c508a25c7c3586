//! Separable Gaussian smoothing with mirror (reflect-101) borders.

use super::raster::GrayImage;
use crate::error::{Error, Result};

pub const DEFAULT_SIGMA: f64 = 1.0;
pub const DEFAULT_KERNEL_SIDE: usize = 5;

/// Normalized 1-D Gaussian weights for offsets `0..=side/2`.
///
/// Only the non-negative half is returned; the kernel is symmetric.
pub fn gaussian_kernel(sigma: f64, kernel_side: usize) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidSigma(sigma));
    }
    if kernel_side == 0 || kernel_side.is_multiple_of(2) {
        return Err(Error::InvalidKernel(kernel_side));
    }
    let radius = kernel_side / 2;
    let two_sigma_sq = 2.0 * sigma * sigma;
    let half: Vec<f64> = (0..=radius)
        .map(|i| (-((i * i) as f64) / two_sigma_sq).exp())
        .collect();
    let total = half[0] + 2.0 * half[1..].iter().sum::<f64>();
    Ok(half.into_iter().map(|w| w / total).collect())
}

/// Reflect-101 index: `-1 -> 1`, `n -> n - 2`. The edge sample is not
/// repeated. Offsets larger than the image fold back repeatedly.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// One separable pass. Each output sums mirrored offset pairs before
/// weighting, so the result is exactly equivariant under flipping the line.
fn convolve_line(src: &[f64], dst: &mut [f64], half: &[f64]) {
    let n = src.len();
    for (c, out) in dst.iter_mut().enumerate() {
        let mut acc = half[0] * src[c];
        for (i, &w) in half.iter().enumerate().skip(1) {
            let left = src[reflect(c as isize - i as isize, n)];
            let right = src[reflect(c as isize + i as isize, n)];
            acc += w * (left + right);
        }
        *out = acc;
    }
}

/// Gaussian blur with a `kernel_side`-tap separable kernel. Intermediate
/// values stay in floating point; the output is rounded once.
pub fn gaussian_blur(img: &GrayImage, sigma: f64, kernel_side: usize) -> Result<GrayImage> {
    let half = gaussian_kernel(sigma, kernel_side)?;
    let (w, h) = img.dimensions();
    let src: Vec<f64> = img.pixels().iter().map(|&v| f64::from(v)).collect();

    let mut horiz = vec![0.0; w * h];
    for (row_in, row_out) in src.chunks_exact(w).zip(horiz.chunks_exact_mut(w)) {
        convolve_line(row_in, row_out, &half);
    }

    let mut column = vec![0.0; h];
    let mut column_out = vec![0.0; h];
    let mut out = vec![0u8; w * h];
    for x in 0..w {
        for y in 0..h {
            column[y] = horiz[y * w + x];
        }
        convolve_line(&column, &mut column_out, &half);
        for y in 0..h {
            out[y * w + x] = column_out[y].round().clamp(0.0, 255.0) as u8;
        }
    }
    GrayImage::new(w, h, out)
}
