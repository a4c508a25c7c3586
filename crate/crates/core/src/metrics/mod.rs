//! Segmentation scoring against ground-truth masks.

pub mod counts;
pub mod report;

pub use counts::{
    accuracy, confusion, dice, f1, precision, sensitivity, specificity, ConfusionCounts, Fraction, SegMetrics,
    METRIC_NAMES,
};
pub use report::{
    evaluate_batch, render_comparison_table, BatchReport, ComparisonRow, EvalPair, ItemReport, REPORT_DECIMALS,
    TABLE_DECIMALS,
};
