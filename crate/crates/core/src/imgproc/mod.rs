//! Raster types, grayscale conversion, Gaussian smoothing and threshold
//! extraction.

pub mod blur;
pub mod otsu;
pub mod raster;
pub mod threshold;

pub use blur::{gaussian_blur, gaussian_kernel};
pub use otsu::{between_class_variance, histogram, otsu_threshold, Histogram256, OtsuResult};
pub use raster::{luma, to_grayscale, GrayImage, RgbImage};
pub use threshold::{apply_threshold, Polarity};
