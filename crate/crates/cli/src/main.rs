//! `cts`: score crack segmentation masks from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 dimension
//! mismatch or unusable pairing.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crack_topology::overlay::{render_overlay, save_overlay};
use crack_topology::report::{render_report, summarize, Summary};
use crack_topology::{
    evaluate_detailed, load_mask, ApplyTo, CtsError, EvalConfig, EvalReport, MatchConfig,
    PreprocessConfig, ReportFormat, SmoothMode,
};
use rayon::prelude::*;

#[derive(Parser, Debug)]
#[command(
    name = "cts",
    version,
    about = "Crack topology score (PCS / RCS / CTS) for binary crack masks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score a single ground-truth / prediction pair
    Eval(EvalArgs),
    /// Score every file name present in both directories
    Batch(BatchArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Ground-truth mask (PNG or binary PGM)
    #[arg(long)]
    gt: PathBuf,

    /// Predicted mask (PNG or binary PGM)
    #[arg(long)]
    pred: PathBuf,

    #[command(flatten)]
    metric: MetricArgs,

    /// Write a color-coded skeleton overlay PNG
    #[arg(long)]
    overlay: Option<PathBuf>,

    /// Write a report file
    #[arg(long)]
    report: Option<PathBuf>,

    /// Report format; inferred from the report extension when omitted (csv otherwise)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct BatchArgs {
    #[arg(long)]
    gt_dir: PathBuf,

    #[arg(long)]
    pred_dir: PathBuf,

    #[command(flatten)]
    metric: MetricArgs,

    /// Directory for per-pair overlay PNGs
    #[arg(long)]
    overlay_dir: Option<PathBuf>,

    /// Report destination; standard output when omitted
    #[arg(long)]
    report: Option<PathBuf>,

    /// Report format; inferred from the report extension when omitted (csv otherwise)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Fail (exit 3) when a file has no counterpart instead of skipping it
    #[arg(long)]
    strict: bool,

    /// Number of pairs evaluated concurrently
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// Buffer radius r in pixels
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    buffer_radius: u32,

    /// Minimum covered fraction for a segment match
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    overlap_threshold: f64,

    /// Fill enclosed holes up to this many pixels (0 = off)
    #[arg(long, default_value_t = 0)]
    hole_fill_area: usize,

    /// Morphological smoothing before thinning
    #[arg(long, value_enum, default_value_t = SmoothArg::None)]
    smooth: SmoothArg,

    /// Disk radius for smoothing (0 = off)
    #[arg(long, default_value_t = 0)]
    smooth_radius: usize,

    /// Masks the preprocessing applies to
    #[arg(long, value_enum, default_value_t = ApplyToArg::Pred)]
    apply_to: ApplyToArg,

    /// Intensity at or above which a pixel is foreground
    #[arg(long, default_value_t = 128)]
    binarize_threshold: u8,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SmoothArg {
    None,
    Open,
    Close,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ApplyToArg {
    Pred,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

impl MetricArgs {
    fn to_config(&self) -> EvalConfig {
        EvalConfig {
            preprocess: PreprocessConfig {
                hole_area_threshold: self.hole_fill_area,
                smooth_mode: match self.smooth {
                    SmoothArg::None => SmoothMode::None,
                    SmoothArg::Open => SmoothMode::Open,
                    SmoothArg::Close => SmoothMode::Close,
                },
                smooth_radius: self.smooth_radius,
                apply_to: match self.apply_to {
                    ApplyToArg::Pred => ApplyTo::PredictionOnly,
                    ApplyToArg::Both => ApplyTo::Both,
                },
            },
            matching: MatchConfig {
                buffer_radius: self.buffer_radius as usize,
                overlap_threshold: self.overlap_threshold,
            },
            binarize_threshold: self.binarize_threshold,
        }
    }
}

fn report_format(explicit: Option<FormatArg>, path: Option<&Path>) -> ReportFormat {
    match explicit {
        Some(FormatArg::Json) => ReportFormat::Json,
        Some(FormatArg::Csv) => ReportFormat::Csv,
        None if path.and_then(Path::extension).is_some_and(|e| e == "json") => ReportFormat::Json,
        None => ReportFormat::Csv,
    }
}

/// A pairing problem in batch mode (exit 3).
#[derive(Debug)]
struct PairingError(String);

impl std::fmt::Display for PairingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for PairingError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<PairingError>().is_some() {
        return 3;
    }
    match err.downcast_ref::<CtsError>() {
        Some(CtsError::DimensionMismatch { .. }) => 3,
        Some(CtsError::InvalidConfig(_)) => 1,
        _ => 2,
    }
}

fn display_path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn evaluate_pair(
    pair_id: &str,
    gt_path: &Path,
    pred_path: &Path,
    cfg: &EvalConfig,
    overlay: Option<&Path>,
) -> Result<EvalReport> {
    let gt = load_mask(gt_path, cfg.binarize_threshold)?;
    let pred = load_mask(pred_path, cfg.binarize_threshold)?;
    let eval = evaluate_detailed(&gt, &pred, cfg)?;
    if let Some(path) = overlay {
        let img = render_overlay(&eval.gt, &eval.pred, &eval.gt_table, &eval.pred_table)?;
        save_overlay(&img, path)?;
    }
    Ok(EvalReport {
        pair_id: pair_id.to_owned(),
        gt_path: display_path(gt_path),
        pred_path: display_path(pred_path),
        scores: eval.scores,
        config_echo: cfg.clone(),
    })
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let cfg = args.metric.to_config();
    let pair_id = args
        .pred
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| display_path(&args.pred));
    let report = evaluate_pair(
        &pair_id,
        &args.gt,
        &args.pred,
        &cfg,
        args.overlay.as_deref(),
    )?;
    let s = &report.scores;
    println!("PCS={:.6} RCS={:.6} CTS={:.6}", s.pcs, s.rcs, s.cts);
    if let Some(path) = &args.report {
        let format = report_format(args.format, Some(path));
        crack_topology::write_report(std::slice::from_ref(&report), format, path)?;
    }
    Ok(())
}

fn file_names(dir: &Path) -> Result<BTreeSet<String>> {
    let mut names = BTreeSet::new();
    let entries = fs::read_dir(dir).map_err(|e| CtsError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for entry in entries {
        let entry = entry.with_context(|| format!("reading {}", dir.display()))?;
        if entry.file_type().is_ok_and(|t| t.is_file()) {
            names.insert(entry.file_name().to_string_lossy().into_owned());
        }
    }
    Ok(names)
}

fn format_summary(s: &Summary) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.6}"));
    format!(
        "pairs={} mean_cts={} micro_pcs={} micro_rcs={} micro_cts={}",
        s.pairs,
        opt(s.mean_cts),
        opt(s.micro_pcs),
        opt(s.micro_rcs),
        opt(s.micro_cts)
    )
}

fn run_batch(args: BatchArgs) -> Result<()> {
    let cfg = args.metric.to_config();
    let gt_names = file_names(&args.gt_dir)?;
    let pred_names = file_names(&args.pred_dir)?;
    let unpaired: Vec<String> = gt_names
        .symmetric_difference(&pred_names)
        .map(|n| {
            let side = if gt_names.contains(n) { "gt" } else { "pred" };
            format!("{side}:{n}")
        })
        .collect();
    if !unpaired.is_empty() {
        if args.strict {
            return Err(PairingError(format!("unpaired files: {}", unpaired.join(", "))).into());
        }
        for u in &unpaired {
            eprintln!("warning: skipping unpaired file {u}");
        }
    }
    let pairs: Vec<&String> = gt_names.intersection(&pred_names).collect();
    if pairs.is_empty() {
        return Err(PairingError("no file names are present in both directories".into()).into());
    }
    if let Some(dir) = &args.overlay_dir {
        fs::create_dir_all(dir).map_err(|e| CtsError::Io {
            path: dir.clone(),
            source: e,
        })?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()
        .map_err(|e| anyhow!("cannot start worker pool: {e}"))?;
    let results: Vec<Result<EvalReport>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|name| {
                let overlay = args
                    .overlay_dir
                    .as_ref()
                    .map(|d| d.join(Path::new(name.as_str()).with_extension("png")));
                evaluate_pair(
                    name,
                    &args.gt_dir.join(name.as_str()),
                    &args.pred_dir.join(name.as_str()),
                    &cfg,
                    overlay.as_deref(),
                )
                .with_context(|| format!("pair {name}"))
            })
            .collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;

    let format = report_format(args.format, args.report.as_deref());
    let summary = format_summary(&summarize(&reports));
    match &args.report {
        Some(path) => {
            crack_topology::write_report(&reports, format, path)?;
            println!("{summary}");
        }
        None => {
            let text = render_report(&reports, format)?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .context("writing report to stdout")?;
            if format == ReportFormat::Csv {
                eprintln!("summary: {summary}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Batch(args) => run_batch(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
