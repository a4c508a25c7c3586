//! Intensity histograms and Otsu threshold selection.

use std::cmp::Ordering;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::raster::GrayImage;
use crate::error::{Error, Result};

/// Counts of each 8-bit intensity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; 256],
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

pub fn histogram(img: &GrayImage) -> Histogram256 {
    let mut counts = [0u64; 256];
    for &v in img.pixels() {
        counts[usize::from(v)] += 1;
    }
    Histogram256 { counts }
}

/// Chosen cut point: foreground/background split is `<= threshold` vs `> threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtsuResult {
    pub threshold: u8,
    pub between_class_variance: f64,
}

/// Integer class statistics at cut `t`: the lower class holds `0..=t`.
struct Split {
    /// |N * s0 - S * n0|, which equals n0 * n1 * |mu0 - mu1|.
    separation: u128,
    /// n0 * n1
    mass_product: u128,
}

fn splits(hist: &Histogram256) -> impl Iterator<Item = (u8, Option<Split>)> + '_ {
    let total = u128::from(hist.total());
    let weighted_total: u128 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * u128::from(c))
        .sum();
    let mut n0 = 0u128;
    let mut s0 = 0u128;
    (0..=254u8).map(move |t| {
        let c = u128::from(hist.counts[usize::from(t)]);
        n0 += c;
        s0 += u128::from(t) * c;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            return (t, None);
        }
        let separation = (total * s0).abs_diff(weighted_total * n0);
        (
            t,
            Some(Split {
                separation,
                mass_product: n0 * n1,
            }),
        )
    })
}

/// Exact comparison of `a.sep^2 / a.mass` against `b.sep^2 / b.mass`.
fn compare(a: &Split, b: &Split) -> Ordering {
    let lhs = a
        .separation
        .checked_mul(a.separation)
        .and_then(|sq| sq.checked_mul(b.mass_product));
    let rhs = b
        .separation
        .checked_mul(b.separation)
        .and_then(|sq| sq.checked_mul(a.mass_product));
    match (lhs, rhs) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => {
            let l = BigUint::from(a.separation).pow(2) * BigUint::from(b.mass_product);
            let r = BigUint::from(b.separation).pow(2) * BigUint::from(a.mass_product);
            l.cmp(&r)
        }
    }
}

/// Between-class variance `w0 * w1 * (mu0 - mu1)^2` at cut `t`, with class
/// weights as fractions of the total mass. Zero when either class is empty.
pub fn between_class_variance(hist: &Histogram256, threshold: u8) -> f64 {
    let total = hist.total() as f64;
    splits(hist)
        .find(|(t, _)| *t == threshold)
        .and_then(|(_, s)| s)
        .map_or(0.0, |s| {
            let sep = s.separation as f64 / total;
            sep * sep / s.mass_product as f64
        })
}

/// Otsu's threshold: the smallest `t` in `0..=254` maximizing the
/// between-class variance. Candidates are compared exactly in integer
/// arithmetic so ties are resolved identically on every platform.
pub fn otsu_threshold(hist: &Histogram256) -> Result<OtsuResult> {
    if hist.occupied_bins() < 2 {
        return Err(Error::DegenerateHistogram);
    }
    let mut best: Option<(u8, Split)> = None;
    for (t, split) in splits(hist) {
        let Some(split) = split else { continue };
        let better = match &best {
            None => true,
            Some((_, b)) => compare(&split, b) == Ordering::Greater,
        };
        if better {
            best = Some((t, split));
        }
    }
    let (threshold, _) = best.ok_or(Error::DegenerateHistogram)?;
    Ok(OtsuResult {
        threshold,
        between_class_variance: between_class_variance(hist, threshold),
    })
}
