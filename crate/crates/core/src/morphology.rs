//! Binary morphology with filled square structuring elements.
//!
//! Conventions:
//! - an element of side `s` covers offsets `-a ..= s - 1 - a` on both axes,
//!   where the anchor `a` is `s / 2`;
//! - dilation sets a pixel if any pixel under the anchored element is set,
//!   reading outside the image as background;
//! - erosion sets a pixel if every pixel under the anchored element is set,
//!   reading outside the image as foreground;
//! - side 0 is the identity.
//!
//! With these rules `erode(m) == !dilate(!m)` holds exactly. Both operators
//! are computed separably with running counts; the result is bitwise equal to
//! the direct neighbourhood definition.

use crate::error::{Error, Result};

/// Row-major foreground map; `true` is lesion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// All-background mask. Panics on a zero dimension.
    pub fn empty(width: usize, height: usize) -> Self {
        Self::filled(width, height, false)
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be non-zero");
        Self {
            width,
            height,
            bits: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                mask.bits[y * width + x] = f(x, y);
            }
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn count_foreground(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn foreground_fraction(&self) -> f64 {
        self.count_foreground() as f64 / self.bits.len() as f64
    }

    /// `true` if every foreground pixel of `self` is foreground in `other`.
    /// Masks of different shape are never subsets.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dimensions() == other.dimensions()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Filled square structuring element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    side: usize,
    anchor: usize,
}

impl StructuringElement {
    /// `side x side` square anchored at `(side / 2, side / 2)`.
    pub const fn square(side: usize) -> Self {
        Self {
            side,
            anchor: side / 2,
        }
    }

    pub const fn identity() -> Self {
        Self::square(0)
    }

    pub const fn side(&self) -> usize {
        self.side
    }

    pub const fn anchor(&self) -> usize {
        self.anchor
    }

    pub const fn is_identity(&self) -> bool {
        self.side == 0
    }

    /// Point reflection through the origin. Odd squares are symmetric and
    /// map to themselves; even squares move their anchor to the other
    /// central cell.
    pub const fn reflected(&self) -> Self {
        if self.side == 0 {
            return *self;
        }
        Self {
            side: self.side,
            anchor: self.side - 1 - self.anchor,
        }
    }

    /// Inclusive offset range covered on each axis.
    pub fn offsets(&self) -> std::ops::RangeInclusive<isize> {
        let lo = -(self.anchor as isize);
        lo..=lo + self.side as isize - 1
    }
}

#[derive(Clone, Copy)]
enum Op {
    Dilate,
    Erode,
}

/// Windowed any/all over a line, clipping the window to the line.
fn line_pass(src: &[bool], dst: &mut [bool], prefix: &mut Vec<u32>, lo: isize, hi: isize, op: Op) {
    let n = src.len() as isize;
    prefix.clear();
    prefix.push(0);
    let mut acc = 0u32;
    for &b in src {
        acc += u32::from(b);
        prefix.push(acc);
    }
    for (i, out) in dst.iter_mut().enumerate() {
        let start = (i as isize + lo).clamp(0, n) as usize;
        let end = (i as isize + hi + 1).clamp(0, n) as usize;
        let (set, len) = if end > start {
            (prefix[end] - prefix[start], (end - start) as u32)
        } else {
            (0, 0)
        };
        *out = match op {
            Op::Dilate => set > 0,
            Op::Erode => set == len,
        };
    }
}

fn separable(mask: &BinaryMask, se: StructuringElement, op: Op) -> BinaryMask {
    if se.is_identity() {
        return mask.clone();
    }
    let (w, h) = mask.dimensions();
    let range = se.offsets();
    let (lo, hi) = (*range.start(), *range.end());
    let mut prefix = Vec::with_capacity(w.max(h) + 1);

    let mut rows = vec![false; w * h];
    for (src, dst) in mask.bits.chunks_exact(w).zip(rows.chunks_exact_mut(w)) {
        line_pass(src, dst, &mut prefix, lo, hi, op);
    }

    let mut out = vec![false; w * h];
    let mut column = vec![false; h];
    let mut column_out = vec![false; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = rows[y * w + x];
        }
        line_pass(&column, &mut column_out, &mut prefix, lo, hi, op);
        for y in 0..h {
            out[y * w + x] = column_out[y];
        }
    }
    BinaryMask {
        width: w,
        height: h,
        bits: out,
    }
}

pub fn dilate(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    separable(mask, se, Op::Dilate)
}

pub fn erode(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    separable(mask, se, Op::Erode)
}

/// Morphological opening: erosion by `se` followed by dilation by its
/// reflection, i.e. the union of all translates of the square that fit inside
/// the mask. For odd sides the reflection is `se` itself.
pub fn open(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    dilate(&erode(mask, se), se.reflected())
}
