//! Command-line front end.
//!
//! Exit codes: 0 success, 1 partial (some items flagged or failed),
//! 2 usage error, 3 fatal I/O or configuration error. Summaries go to
//! stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataset::{
    build_manifest, emit_dataset, label_counts, load_metadata, map_diagnosis, read_manifest, write_manifest,
    BinaryLabel, DiagnosisMapping,
};
use crate::error::{Error, Result};
use crate::imgproc::RgbImage;
use crate::metrics::{evaluate_batch, render_comparison_table, BatchReport, ComparisonRow, EvalPair, TABLE_DECIMALS};
use crate::pipeline::{apply_mask, export_mask, generate_mask, ApplicationMode, KernelPair, PipelineConfig, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Partial,
    Usage,
    Fatal,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Partial => 1,
            ExitStatus::Usage => 2,
            ExitStatus::Fatal => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lesionmask", version, about = "Shape-preserving lesion masks, mask-sweep datasets and segmentation scoring")]
struct Cli {
    /// Worker threads for batch subcommands [default: available parallelism]
    #[arg(long, global = true, env = "LESIONMASK_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the mask for one image
    Segment(SegmentArgs),
    /// Emit masked datasets for a list of <dilate>_<clean> kernel pairs
    Sweep(SweepArgs),
    /// Score predicted masks against ground truth
    Evaluate(EvaluateArgs),
    /// Map diagnosis codes to benign/malignant labels
    Relabel(RelabelArgs),
    /// Join metadata to image files and write a manifest CSV
    Manifest(ManifestArgs),
}

#[derive(Debug, Args)]
struct SegmentArgs {
    /// Input RGB image (PNG or JPEG)
    #[arg(long)]
    input: PathBuf,
    /// Pipeline config (TOML); built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output mask PNG (255 = lesion)
    #[arg(long)]
    out_mask: PathBuf,
    /// Also write the mask applied to the input image
    #[arg(long, requires = "mode")]
    out_applied: Option<PathBuf>,
    /// Application mode for --out-applied: maskonly, ablate or isolate
    #[arg(long, value_parser = parse_mode, requires = "out_applied")]
    mode: Option<ApplicationMode>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Manifest CSV (image_id,path,label,dx,truth)
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated <dilate>_<clean> pairs, e.g. 10_10,15_15,10_5,50_80
    #[arg(long, value_parser = parse_pairs, value_delimiter = ',', required = true)]
    pairs: Vec<KernelPair>,
    /// Application mode: maskonly, ablate or isolate
    #[arg(long, value_parser = parse_mode)]
    mode: ApplicationMode,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Base pipeline config (TOML) shared by every pair
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Directory of predicted masks, or a pair CSV with columns id,pred,truth
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth masks
    #[arg(long)]
    truth: PathBuf,
    /// Report path; .json writes JSON, anything else CSV
    #[arg(long)]
    report: PathBuf,
    /// Reference rows (method,acc,se,sp,f1,dice) to print alongside this run
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RelabelArgs {
    /// Metadata CSV with lesion_id,image_id,dx columns
    #[arg(long)]
    metadata: PathBuf,
    /// Mapping CSV (dx,label) or "default"
    #[arg(long, default_value = "default")]
    mapping: String,
    /// Output CSV (image_id,dx,label)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ManifestArgs {
    /// Metadata CSV with lesion_id,image_id,dx columns
    #[arg(long)]
    metadata: PathBuf,
    /// Directory holding <image_id>.jpg / .png
    #[arg(long)]
    images: PathBuf,
    /// Directory of ground-truth masks (<image_id>.png or <image_id>_segmentation.png)
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Mapping CSV (dx,label) or "default"
    #[arg(long, default_value = "default")]
    mapping: String,
    /// Output manifest CSV
    #[arg(long)]
    out: PathBuf,
}

fn parse_mode(s: &str) -> std::result::Result<ApplicationMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pairs(s: &str) -> std::result::Result<KernelPair, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` and runs the chosen subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                ExitStatus::Usage
            } else {
                let _ = write!(out, "{rendered}");
                ExitStatus::Success
            };
        }
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return ExitStatus::Fatal;
        }
    };

    let result = match cli.command {
        Command::Segment(a) => cmd_segment(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, &pool, out, err),
        Command::Evaluate(a) => cmd_evaluate(a, &pool, out, err),
        Command::Relabel(a) => cmd_relabel(a, out, err),
        Command::Manifest(a) => cmd_manifest(a, out, err),
    };
    match result {
        Ok(status) => status,
        Err(CmdError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            ExitStatus::Usage
        }
        Err(CmdError::Fatal(e)) => {
            let _ = writeln!(err, "error: {e}");
            ExitStatus::Fatal
        }
    }
}

enum CmdError {
    Usage(String),
    Fatal(Error),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Fatal(e)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Fatal(Error::io("<stdout>", e))
    }
}

type CmdResult = std::result::Result<ExitStatus, CmdError>;

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            PipelineConfig::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn load_mapping(spec: &str) -> Result<DiagnosisMapping> {
    if spec.eq_ignore_ascii_case("default") {
        Ok(DiagnosisMapping::default())
    } else {
        DiagnosisMapping::load_csv(spec)
    }
}

fn partial_if(flagged: bool) -> ExitStatus {
    if flagged {
        ExitStatus::Partial
    } else {
        ExitStatus::Success
    }
}

fn cmd_segment(a: SegmentArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CmdResult {
    let cfg = load_config(a.config.as_deref())?;
    let img = RgbImage::open(&a.input)?;
    let outcome = generate_mask(&img, &cfg)?;
    export_mask(&outcome.mask, &a.out_mask)?;
    if let (Some(path), Some(mode)) = (&a.out_applied, a.mode) {
        apply_mask(&img, &outcome.mask, mode)?.save_png(path)?;
    }
    let threshold = match (outcome.otsu, cfg.threshold) {
        (Some(r), _) => format!("otsu:{}", r.threshold),
        (None, crate::pipeline::ThresholdMethod::Global(v)) => format!("global:{v}"),
        (None, _) => "none".to_string(),
    };
    let flags = if outcome.is_flagged() {
        outcome.flags_label()
    } else {
        "none".to_string()
    };
    writeln!(
        out,
        "{}: threshold={threshold} foreground_fraction={:.4} flags={flags}",
        a.input.display(),
        outcome.foreground_fraction
    )?;
    Ok(partial_if(outcome.is_flagged()))
}

fn cmd_sweep(a: SweepArgs, pool: &rayon::ThreadPool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let base = load_config(a.config.as_deref())?;
    let sweep = SweepSpec::new(a.pairs, base).map_err(|e| CmdError::Usage(e.to_string()))?;
    let manifest = read_manifest(&a.manifest)?;
    if manifest.is_empty() {
        return Err(Error::Config(format!("{}: manifest has no rows", a.manifest.display())).into());
    }
    let summary = pool.install(|| emit_dataset(&manifest, &sweep, a.mode, &a.out))?;
    for pair in sweep.pairs() {
        writeln!(
            out,
            "{pair}: written={} flagged={}",
            summary.written.get(pair).copied().unwrap_or(0),
            summary.flagged.get(pair).copied().unwrap_or(0)
        )?;
    }
    let counts = label_counts(&manifest);
    writeln!(
        out,
        "images={} benign={} malignant={} failed={}",
        manifest.len(),
        counts.get(&BinaryLabel::Benign).unwrap_or(&0),
        counts.get(&BinaryLabel::Malignant).unwrap_or(&0),
        summary.failures.len()
    )?;
    for (id, msg) in &summary.failures {
        let _ = writeln!(err, "warning: {id}: {msg}");
    }
    Ok(partial_if(!summary.is_clean()))
}

const MASK_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "bmp", "gif"];

fn list_masks(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_mask = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| MASK_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if path.is_file() && is_mask {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                files.push((stem.to_string(), path.clone()));
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Pairs predictions with truth masks by file stem. A truth file named
/// `<stem>_segmentation` also matches.
fn resolve_pairs(pred: &Path, truth: &Path, err: &mut dyn Write) -> Result<(Vec<EvalPair>, Vec<String>)> {
    let truth_files = list_masks(truth)?;
    let find_truth = |id: &str| {
        let seg = format!("{id}_segmentation");
        truth_files
            .iter()
            .find(|(s, _)| s == id)
            .or_else(|| truth_files.iter().find(|(s, _)| *s == seg))
            .map(|(_, p)| p.clone())
    };

    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    if pred.is_file() {
        let base = pred.parent().unwrap_or(Path::new("."));
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(pred)
            .map_err(|e| Error::csv(pred, e))?;
        #[derive(serde::Deserialize)]
        struct Row {
            id: String,
            pred: PathBuf,
            truth: Option<PathBuf>,
        }
        for row in reader.deserialize() {
            let row: Row = row.map_err(|e| Error::csv(pred, e))?;
            let truth_path = match row.truth.filter(|t| !t.as_os_str().is_empty()) {
                Some(t) => Some(truth.join(t)),
                None => find_truth(&row.id),
            };
            match truth_path {
                Some(t) => pairs.push(EvalPair {
                    id: row.id,
                    pred: base.join(row.pred),
                    truth: t,
                }),
                None => unmatched.push(row.id),
            }
        }
    } else {
        for (id, path) in list_masks(pred)? {
            match find_truth(&id) {
                Some(t) => pairs.push(EvalPair { id, pred: path, truth: t }),
                None => unmatched.push(id),
            }
        }
    }
    for id in &unmatched {
        let _ = writeln!(err, "warning: no ground truth for {id}");
    }
    Ok((pairs, unmatched))
}

fn cmd_evaluate(a: EvaluateArgs, pool: &rayon::ThreadPool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (pairs, unmatched) = resolve_pairs(&a.pred, &a.truth, err)?;
    if pairs.is_empty() {
        return Err(Error::Config(format!(
            "no prediction/truth pairs resolved between {} and {}",
            a.pred.display(),
            a.truth.display()
        ))
        .into());
    }
    let report = pool.install(|| evaluate_batch(&pairs));
    report.write(&a.report)?;
    writeln!(out, "{}", BatchReport::summary_line("macro", &report.macro_means))?;
    writeln!(out, "{}", BatchReport::summary_line("micro", &report.micro_f64()))?;
    writeln!(
        out,
        "items={} flagged={} unmatched={}",
        report.items.len(),
        report.n_flagged,
        unmatched.len()
    )?;
    for item in report.items.iter().filter(|i| i.error.is_some()) {
        let _ = writeln!(err, "warning: {}: {}", item.id, item.error.as_deref().unwrap_or_default());
    }
    if let Some(reference) = &a.reference {
        let mut rows = vec![ComparisonRow::from_metrics("this run (micro)", &report.micro)];
        rows.extend(ComparisonRow::load_csv(reference)?);
        write!(out, "{}", render_comparison_table(&rows, TABLE_DECIMALS))?;
    }
    Ok(partial_if(report.n_flagged > 0 || !unmatched.is_empty()))
}

fn cmd_relabel(a: RelabelArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mapping = load_mapping(&a.mapping)?;
    let load = load_metadata(&a.metadata)?;
    let mut unknown: Vec<&str> = load
        .records
        .iter()
        .filter(|r| mapping.get(&r.dx).is_none())
        .map(|r| r.dx.as_str())
        .collect();
    unknown.sort_unstable();
    unknown.dedup();
    if !unknown.is_empty() {
        return Err(Error::UnknownDiagnosis(unknown.join(", ")).into());
    }

    let path = &a.out;
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["image_id", "dx", "label"]).map_err(|e| Error::csv(path, e))?;
    let (mut benign, mut malignant) = (0usize, 0usize);
    for r in &load.records {
        let label = map_diagnosis(&r.dx, &mapping)?;
        match label {
            BinaryLabel::Benign => benign += 1,
            BinaryLabel::Malignant => malignant += 1,
        }
        w.write_record([r.image_id.as_str(), r.dx.as_str(), label.as_str()])
            .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    for e in &load.errors {
        let _ = writeln!(err, "warning: line {}: {}", e.line, e.message);
    }
    writeln!(
        out,
        "rows={} benign={benign} malignant={malignant} malformed={}",
        load.records.len(),
        load.errors.len()
    )?;
    Ok(partial_if(!load.errors.is_empty()))
}

fn cmd_manifest(a: ManifestArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mapping = load_mapping(&a.mapping)?;
    let load = load_metadata(&a.metadata)?;
    let (rows, summary) = build_manifest(&load.records, &a.images, a.truth.as_deref(), &mapping)?;
    write_manifest(&rows, &a.out)?;
    for id in &summary.missing {
        let _ = writeln!(err, "warning: no image file for {id}");
    }
    for (id, dx) in &summary.unmapped {
        let _ = writeln!(err, "warning: {id}: unmapped diagnosis {dx:?}");
    }
    writeln!(
        out,
        "rows={} benign={} malignant={} missing={} duplicates={} unmapped={} malformed={}",
        rows.len(),
        summary.count(BinaryLabel::Benign),
        summary.count(BinaryLabel::Malignant),
        summary.missing.len(),
        summary.duplicates.len(),
        summary.unmapped.len(),
        load.errors.len()
    )?;
    let partial = !summary.missing.is_empty()
        || !summary.duplicates.is_empty()
        || !summary.unmapped.is_empty()
        || !load.errors.is_empty();
    Ok(partial_if(partial))
}
