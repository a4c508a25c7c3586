//! Pixelwise confusion counts and the derived ratio metrics.
//!
//! Every metric is an exact fraction. A zero denominator gives `None`
//! ("undefined") rather than 0 or 1, so empty-mask failures never leak into
//! averages as if they were scores.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::BinaryMask;

pub type Fraction = Ratio<u128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub const fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self::new(self.tp * k, self.fp * k, self.tn * k, self.fn_ * k)
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.tp + o.tp, self.fp + o.fp, self.tn + o.tn, self.fn_ + o.fn_)
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

pub fn confusion(pred: &BinaryMask, truth: &BinaryMask) -> Result<ConfusionCounts> {
    if pred.dimensions() != truth.dimensions() {
        return Err(Error::DimensionMismatch {
            left: pred.dimensions(),
            right: truth.dimensions(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.bits().iter().zip(truth.bits()) {
        match (p, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

fn fraction(num: u64, den: u64) -> Option<Fraction> {
    (den > 0).then(|| Ratio::new(u128::from(num), u128::from(den)))
}

/// (TP + TN) / (TP + TN + FP + FN)
pub fn accuracy(c: &ConfusionCounts) -> Option<Fraction> {
    fraction(c.tp + c.tn, c.total())
}

/// TP / (TP + FN), also called recall.
pub fn sensitivity(c: &ConfusionCounts) -> Option<Fraction> {
    fraction(c.tp, c.tp + c.fn_)
}

/// TN / (TN + FP)
pub fn specificity(c: &ConfusionCounts) -> Option<Fraction> {
    fraction(c.tn, c.tn + c.fp)
}

/// TP / (TP + FP)
pub fn precision(c: &ConfusionCounts) -> Option<Fraction> {
    fraction(c.tp, c.tp + c.fp)
}

/// Harmonic mean of precision and recall, computed from those two ratios.
/// Undefined if either is undefined or both are zero.
pub fn f1(c: &ConfusionCounts) -> Option<Fraction> {
    let p = precision(c)?;
    let r = sensitivity(c)?;
    let sum = p + r;
    if sum == Ratio::from_integer(0) {
        return None;
    }
    Some(Ratio::from_integer(2) * p * r / sum)
}

/// 2 TP / (2 TP + FP + FN): overlap over the summed sizes of both masks.
pub fn dice(c: &ConfusionCounts) -> Option<Fraction> {
    fraction(2 * c.tp, 2 * c.tp + c.fp + c.fn_)
}

pub fn to_f64(f: &Fraction) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// The full metric set for one confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegMetrics {
    pub accuracy: Option<Fraction>,
    pub sensitivity: Option<Fraction>,
    pub specificity: Option<Fraction>,
    pub precision: Option<Fraction>,
    pub f1: Option<Fraction>,
    pub dice: Option<Fraction>,
}

/// Short column names in report order.
pub const METRIC_NAMES: [&str; 6] = ["acc", "se", "sp", "precision", "f1", "dice"];

impl SegMetrics {
    pub fn from_counts(c: &ConfusionCounts) -> Self {
        Self {
            accuracy: accuracy(c),
            sensitivity: sensitivity(c),
            specificity: specificity(c),
            precision: precision(c),
            f1: f1(c),
            dice: dice(c),
        }
    }

    /// Values in [`METRIC_NAMES`] order.
    pub fn values(&self) -> [Option<Fraction>; 6] {
        [
            self.accuracy,
            self.sensitivity,
            self.specificity,
            self.precision,
            self.f1,
            self.dice,
        ]
    }

    pub fn values_f64(&self) -> [Option<f64>; 6] {
        self.values().map(|v| v.as_ref().map(to_f64))
    }

    pub fn undefined(&self) -> Vec<&'static str> {
        METRIC_NAMES
            .iter()
            .zip(self.values())
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| *n)
            .collect()
    }

    pub fn all_defined(&self) -> bool {
        self.values().iter().all(Option::is_some)
    }
}
