//! Machine-readable evaluation reports (CSV and JSON) and their summaries.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{CtsError, Result};
use crate::scoring::{harmonic_cts, EvalConfig, Scores};

pub const CSV_HEADER: &str = "pair_id,gt_path,pred_path,pcs,rcs,cts,pred_total_len,pred_matched_len,gt_total_len,gt_matched_len,degenerate_flag";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!(
                "unknown report format `{other}` (expected json or csv)"
            )),
        }
    }
}

/// Scores for one ground-truth / prediction pair plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub pair_id: String,
    pub gt_path: String,
    pub pred_path: String,
    pub scores: Scores,
    pub config_echo: EvalConfig,
}

/// Aggregates over a set of reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub pairs: usize,
    /// Arithmetic mean of per-pair CTS.
    pub mean_cts: Option<f64>,
    /// Pooled matched / total predicted length over all pairs.
    pub micro_pcs: Option<f64>,
    pub micro_rcs: Option<f64>,
    /// Harmonic mean of `micro_pcs` and `micro_rcs`.
    pub micro_cts: Option<f64>,
}

/// Mean CTS plus pooled micro scores. Pooled ratios with a zero denominator
/// count as 0, unless both denominators are zero (only `both_empty` pairs), in
/// which case the micro scores are undefined.
pub fn summarize(reports: &[EvalReport]) -> Summary {
    if reports.is_empty() {
        return Summary {
            pairs: 0,
            mean_cts: None,
            micro_pcs: None,
            micro_rcs: None,
            micro_cts: None,
        };
    }
    let mut cts_sum = 0.0;
    let (mut pm, mut pt, mut gm, mut gt) = (0.0, 0.0, 0.0, 0.0);
    for r in reports {
        cts_sum += r.scores.cts;
        pm += r.scores.pred_matched_len;
        pt += r.scores.pred_total_len;
        gm += r.scores.gt_matched_len;
        gt += r.scores.gt_total_len;
    }
    let ratio = |m: f64, t: f64| if t > 0.0 { m / t } else { 0.0 };
    let (micro_pcs, micro_rcs, micro_cts) = if pt == 0.0 && gt == 0.0 {
        (None, None, None)
    } else {
        let p = ratio(pm, pt);
        let r = ratio(gm, gt);
        (Some(p), Some(r), Some(harmonic_cts(p, r)))
    };
    Summary {
        pairs: reports.len(),
        mean_cts: Some(cts_sum / reports.len() as f64),
        micro_pcs,
        micro_rcs,
        micro_cts,
    }
}

#[derive(Serialize)]
struct PairRow<'a> {
    pair_id: &'a str,
    gt_path: &'a str,
    pred_path: &'a str,
    pcs: f64,
    rcs: f64,
    cts: f64,
    pred_total_len: f64,
    pred_matched_len: f64,
    gt_total_len: f64,
    gt_matched_len: f64,
    degenerate_flag: &'static str,
}

impl<'a> From<&'a EvalReport> for PairRow<'a> {
    fn from(r: &'a EvalReport) -> Self {
        let s = &r.scores;
        Self {
            pair_id: &r.pair_id,
            gt_path: &r.gt_path,
            pred_path: &r.pred_path,
            pcs: s.pcs,
            rcs: s.rcs,
            cts: s.cts,
            pred_total_len: s.pred_total_len,
            pred_matched_len: s.pred_matched_len,
            gt_total_len: s.gt_total_len,
            gt_matched_len: s.gt_matched_len,
            degenerate_flag: s.degenerate_flag.as_str(),
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: Option<&'a EvalConfig>,
    pairs: Vec<PairRow<'a>>,
    summary: Summary,
}

fn common_config(reports: &[EvalReport]) -> Result<Option<&EvalConfig>> {
    let Some(first) = reports.first() else {
        return Ok(None);
    };
    if let Some(other) = reports.iter().find(|r| r.config_echo != first.config_echo) {
        return Err(CtsError::Contract(format!(
            "pair `{}` was evaluated with a different configuration than `{}`",
            other.pair_id, first.pair_id
        )));
    }
    Ok(Some(&first.config_echo))
}

fn fixed6(v: f64) -> String {
    format!("{v:.6}")
}

/// CSV text: the fixed header, then one row per report with 6-decimal floats.
pub fn render_csv(reports: &[EvalReport]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CtsError::Contract(format!("csv encoding failed: {e}"));
    writer
        .write_record(CSV_HEADER.split(','))
        .map_err(csv_err)?;
    for r in reports {
        let s = &r.scores;
        writer
            .write_record([
                r.pair_id.as_str(),
                r.gt_path.as_str(),
                r.pred_path.as_str(),
                &fixed6(s.pcs),
                &fixed6(s.rcs),
                &fixed6(s.cts),
                &fixed6(s.pred_total_len),
                &fixed6(s.pred_matched_len),
                &fixed6(s.gt_total_len),
                &fixed6(s.gt_matched_len),
                s.degenerate_flag.as_str(),
            ])
            .map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CtsError::Contract(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// JSON text with `config`, `pairs` and `summary`.
pub fn render_json(reports: &[EvalReport]) -> Result<String> {
    let doc = JsonReport {
        config: common_config(reports)?,
        pairs: reports.iter().map(PairRow::from).collect(),
        summary: summarize(reports),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CtsError::Contract(format!("json encoding failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn render_report(reports: &[EvalReport], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => render_csv(reports),
        ReportFormat::Json => render_json(reports),
    }
}

pub fn write_report(
    reports: &[EvalReport],
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let text = render_report(reports, format)?;
    fs::write(path, text).map_err(|e| CtsError::io(path, e))
}
