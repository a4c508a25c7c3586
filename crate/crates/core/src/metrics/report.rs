//! Batch scoring, aggregation and report rendering.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::counts::{confusion, ConfusionCounts, SegMetrics, METRIC_NAMES};
use crate::error::{Error, Result};
use crate::morphology::BinaryMask;
use crate::pipeline::{import_mask, DEFAULT_IMPORT_THRESHOLD};

/// Decimal places used in CSV/JSON reports.
pub const REPORT_DECIMALS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ItemReport {
    pub id: String,
    pub counts: Option<ConfusionCounts>,
    pub metrics: Option<SegMetrics>,
    pub error: Option<String>,
}

impl ItemReport {
    pub fn scored(id: impl Into<String>, pred: &BinaryMask, truth: &BinaryMask) -> Self {
        let id = id.into();
        match confusion(pred, truth) {
            Ok(c) => Self {
                id,
                counts: Some(c),
                metrics: Some(SegMetrics::from_counts(&c)),
                error: None,
            },
            Err(e) => Self::failed(id, &e),
        }
    }

    pub fn failed(id: impl Into<String>, err: &Error) -> Self {
        Self {
            id: id.into(),
            counts: None,
            metrics: None,
            error: Some(err.to_string()),
        }
    }

    /// `error`, or `undefined_<metric>` for each undefined metric.
    pub fn flags(&self) -> Vec<String> {
        match (&self.error, &self.metrics) {
            (Some(_), _) | (None, None) => vec!["error".to_string()],
            (None, Some(m)) => m.undefined().into_iter().map(|n| format!("undefined_{n}")).collect(),
        }
    }

    pub fn is_flagged(&self) -> bool {
        !self.flags().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub items: Vec<ItemReport>,
    /// Per-metric mean over the items where that metric is defined.
    pub macro_means: [Option<f64>; 6],
    pub micro_counts: ConfusionCounts,
    pub micro: SegMetrics,
    pub n_flagged: usize,
}

impl BatchReport {
    pub fn from_items(items: Vec<ItemReport>) -> Self {
        let micro_counts: ConfusionCounts = items.iter().filter_map(|i| i.counts).sum();
        let mut sums = [0.0f64; 6];
        let mut ns = [0usize; 6];
        for m in items.iter().filter_map(|i| i.metrics.as_ref()) {
            for (k, v) in m.values_f64().into_iter().enumerate() {
                if let Some(v) = v {
                    sums[k] += v;
                    ns[k] += 1;
                }
            }
        }
        let mut macro_means = [None; 6];
        for k in 0..6 {
            if ns[k] > 0 {
                macro_means[k] = Some(sums[k] / ns[k] as f64);
            }
        }
        let n_flagged = items.iter().filter(|i| i.is_flagged()).count();
        Self {
            micro: SegMetrics::from_counts(&micro_counts),
            items,
            macro_means,
            micro_counts,
            n_flagged,
        }
    }

    pub fn micro_f64(&self) -> [Option<f64>; 6] {
        self.micro.values_f64()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,tp,fp,tn,fn,acc,se,sp,precision,f1,dice,flags\n");
        for item in &self.items {
            let counts = item
                .counts
                .map(|c| [c.tp, c.fp, c.tn, c.fn_].map(|v| v.to_string()))
                .unwrap_or_else(|| std::array::from_fn(|_| String::new()));
            let values = item
                .metrics
                .map(|m| m.values_f64())
                .unwrap_or([None; 6])
                .map(|v| format_metric(v, REPORT_DECIMALS));
            let mut row = vec![csv_field(&item.id)];
            row.extend(counts);
            row.extend(values);
            row.push(item.flags().join(";"));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .items
            .iter()
            .map(|item| {
                let mut obj = Map::new();
                obj.insert("id".into(), json!(item.id));
                let c = item.counts;
                obj.insert("tp".into(), json!(c.map(|c| c.tp)));
                obj.insert("fp".into(), json!(c.map(|c| c.fp)));
                obj.insert("tn".into(), json!(c.map(|c| c.tn)));
                obj.insert("fn".into(), json!(c.map(|c| c.fn_)));
                let values = item.metrics.map(|m| m.values_f64()).unwrap_or([None; 6]);
                insert_metrics(&mut obj, values);
                obj.insert("flags".into(), json!(item.flags()));
                obj.insert("error".into(), json!(item.error));
                Value::Object(obj)
            })
            .collect();

        let mut macro_block = Map::new();
        insert_metrics(&mut macro_block, self.macro_means);

        let mut micro_block = Map::new();
        let c = self.micro_counts;
        micro_block.insert("tp".into(), json!(c.tp));
        micro_block.insert("fp".into(), json!(c.fp));
        micro_block.insert("tn".into(), json!(c.tn));
        micro_block.insert("fn".into(), json!(c.fn_));
        insert_metrics(&mut micro_block, self.micro_f64());

        json!({
            "n_items": self.items.len(),
            "n_flagged": self.n_flagged,
            "items": items,
            "macro": macro_block,
            "micro": micro_block,
        })
    }

    /// Writes CSV or JSON depending on the file extension (`.json` -> JSON).
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
            s.push('\n');
            s
        } else {
            self.to_csv()
        };
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
    }

    /// `label: acc=.. se=.. sp=.. precision=.. f1=.. dice=..`
    pub fn summary_line(label: &str, values: &[Option<f64>; 6]) -> String {
        let mut s = format!("{label}:");
        for (name, v) in METRIC_NAMES.iter().zip(values) {
            let _ = write!(s, " {name}={}", format_metric(*v, REPORT_DECIMALS));
        }
        s
    }
}

fn insert_metrics(obj: &mut Map<String, Value>, values: [Option<f64>; 6]) {
    for (name, v) in METRIC_NAMES.iter().zip(values) {
        obj.insert((*name).into(), json!(v.map(round_report)));
    }
}

fn round_report(v: f64) -> f64 {
    let scale = 10f64.powi(REPORT_DECIMALS as i32);
    (v * scale).round() / scale
}

pub fn format_metric(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{v:.decimals$}"),
        None => "NA".to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Prediction/truth file pair for one item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPair {
    pub id: String,
    pub pred: PathBuf,
    pub truth: PathBuf,
}

/// Scores every pair in parallel. Per-item failures are recorded in the
/// report; item order follows the input order.
pub fn evaluate_batch(pairs: &[EvalPair]) -> BatchReport {
    let items = pairs
        .par_iter()
        .map(|p| {
            let loaded = import_mask(&p.pred, DEFAULT_IMPORT_THRESHOLD)
                .and_then(|pred| Ok((pred, import_mask(&p.truth, DEFAULT_IMPORT_THRESHOLD)?)));
            match loaded {
                Ok((pred, truth)) => ItemReport::scored(&p.id, &pred, &truth),
                Err(e) => ItemReport::failed(&p.id, &e),
            }
        })
        .collect();
    BatchReport::from_items(items)
}

/// One row of a method comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub acc: Option<f64>,
    pub se: Option<f64>,
    pub sp: Option<f64>,
    pub f1: Option<f64>,
    pub dice: Option<f64>,
}

impl ComparisonRow {
    pub fn from_metrics(method: impl Into<String>, m: &SegMetrics) -> Self {
        let [acc, se, sp, _, f1, dice] = m.values_f64();
        Self {
            method: method.into(),
            acc,
            se,
            sp,
            f1,
            dice,
        }
    }

    /// Reads user-supplied reference rows from `method,acc,se,sp,f1,dice`.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<Self>> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        reader
            .deserialize()
            .collect::<std::result::Result<Vec<Self>, _>>()
            .map_err(|e| Error::csv(path, e))
    }
}

/// Decimal places of the published comparison table.
pub const TABLE_DECIMALS: usize = 2;

/// Markdown table with columns ACC, SE, SP, F1, DC.
pub fn render_comparison_table(rows: &[ComparisonRow], decimals: usize) -> String {
    let mut out = String::from("| Method | ACC | SE | SP | F1 | DC |\n|---|---|---|---|---|---|\n");
    for r in rows {
        let cells = [r.acc, r.se, r.sp, r.f1, r.dice].map(|v| format_metric(v, decimals));
        let _ = writeln!(out, "| {} | {} |", r.method, cells.join(" | "));
    }
    out
}
