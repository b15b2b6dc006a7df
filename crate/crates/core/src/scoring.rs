//! Length-weighted PCS / RCS, their harmonic mean, and the end-to-end pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{CtsError, Result};
use crate::io::DEFAULT_BINARIZE_THRESHOLD;
use crate::mask::BinaryMask;
use crate::matching::{match_all, MatchConfig, MatchTable};
use crate::preprocess::{run_preprocess, PreprocessConfig};
use crate::skeleton::{decompose, thin, SegmentDecomposition, Skeleton};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub preprocess: PreprocessConfig,
    #[serde(rename = "match")]
    pub matching: MatchConfig,
    /// Intensity at or above which an input pixel counts as foreground. Only used when loading files.
    pub binarize_threshold: u8,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            preprocess: PreprocessConfig::default(),
            matching: MatchConfig::default(),
            binarize_threshold: DEFAULT_BINARIZE_THRESHOLD,
        }
    }
}

/// Which side, if any, had an empty skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateFlag {
    #[default]
    None,
    BothEmpty,
    PredEmpty,
    GtEmpty,
}

impl DegenerateFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            DegenerateFlag::None => "none",
            DegenerateFlag::BothEmpty => "both_empty",
            DegenerateFlag::PredEmpty => "pred_empty",
            DegenerateFlag::GtEmpty => "gt_empty",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(DegenerateFlag::None),
            "both_empty" => Some(DegenerateFlag::BothEmpty),
            "pred_empty" => Some(DegenerateFlag::PredEmpty),
            "gt_empty" => Some(DegenerateFlag::GtEmpty),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub pcs: f64,
    pub rcs: f64,
    pub cts: f64,
    pub pred_total_len: f64,
    pub pred_matched_len: f64,
    pub gt_total_len: f64,
    pub gt_matched_len: f64,
    pub degenerate_flag: DegenerateFlag,
}

/// Matched and total segment length for one side, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthScore {
    pub score: f64,
    pub matched_len: f64,
    pub total_len: f64,
}

fn length_score(table: &MatchTable, decomp: &SegmentDecomposition) -> Result<LengthScore> {
    if table.len() != decomp.segments.len() {
        return Err(CtsError::Contract(format!(
            "match table has {} rows for {} segments",
            table.len(),
            decomp.segments.len()
        )));
    }
    let mut matched_len = 0.0;
    let mut total_len = 0.0;
    for (row, seg) in table.rows.iter().zip(&decomp.segments) {
        if row.segment_id != seg.id {
            return Err(CtsError::Contract(format!(
                "match row for segment {} paired with segment {}",
                row.segment_id, seg.id
            )));
        }
        total_len += seg.length;
        if row.matched {
            matched_len += seg.length;
        }
    }
    let score = if total_len > 0.0 {
        matched_len / total_len
    } else {
        0.0
    };
    Ok(LengthScore {
        score,
        matched_len,
        total_len,
    })
}

/// Share of predicted segment length matched to the ground truth.
pub fn compute_pcs(pred_table: &MatchTable, pred: &SegmentDecomposition) -> Result<LengthScore> {
    length_score(pred_table, pred)
}

/// Share of ground-truth segment length recovered by the prediction.
pub fn compute_rcs(gt_table: &MatchTable, gt: &SegmentDecomposition) -> Result<LengthScore> {
    length_score(gt_table, gt)
}

/// Harmonic mean, defined as 0 when both inputs are 0.
pub fn harmonic_cts(pcs: f64, rcs: f64) -> f64 {
    if pcs + rcs == 0.0 {
        0.0
    } else {
        2.0 * pcs * rcs / (pcs + rcs)
    }
}

/// Everything computed on the way to the scores, for overlays and debugging.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub scores: Scores,
    pub gt_skeleton: Skeleton,
    pub pred_skeleton: Skeleton,
    pub gt: SegmentDecomposition,
    pub pred: SegmentDecomposition,
    /// Ground-truth segments matched against the prediction (RCS side).
    pub gt_table: MatchTable,
    /// Predicted segments matched against the ground truth (PCS side).
    pub pred_table: MatchTable,
}

/// Scores a prediction against a ground-truth mask.
pub fn evaluate(gt: &BinaryMask, pred: &BinaryMask, cfg: &EvalConfig) -> Result<Scores> {
    evaluate_detailed(gt, pred, cfg).map(|e| e.scores)
}

/// Like [`evaluate`], keeping skeletons, decompositions and match tables.
///
/// If both skeletons are empty the result is a perfect `(1, 1, 1)` flagged
/// `both_empty`. If only one side is empty all three scores are 0 and the flag
/// names the empty side.
pub fn evaluate_detailed(
    gt: &BinaryMask,
    pred: &BinaryMask,
    cfg: &EvalConfig,
) -> Result<Evaluation> {
    gt.ensure_same_dims(pred)?;
    cfg.matching.validate()?;
    let (gt_mask, pred_mask) = run_preprocess(gt, pred, &cfg.preprocess);
    let gt_skeleton = thin(&gt_mask);
    let pred_skeleton = thin(&pred_mask);
    evaluate_skeletons(gt_skeleton, pred_skeleton, &cfg.matching)
}

/// Scores two skeletons that are already thinning fixed points.
pub fn evaluate_skeletons(
    gt_skeleton: Skeleton,
    pred_skeleton: Skeleton,
    cfg: &MatchConfig,
) -> Result<Evaluation> {
    let gt = decompose(&gt_skeleton)?;
    let pred = decompose(&pred_skeleton)?;
    let pred_table = match_all(&pred, &gt, cfg)?;
    let gt_table = match_all(&gt, &pred, cfg)?;
    let precision = compute_pcs(&pred_table, &pred)?;
    let recall = compute_rcs(&gt_table, &gt)?;

    let flag = match (gt.is_empty(), pred.is_empty()) {
        (true, true) => DegenerateFlag::BothEmpty,
        (false, true) => DegenerateFlag::PredEmpty,
        (true, false) => DegenerateFlag::GtEmpty,
        (false, false) => DegenerateFlag::None,
    };
    let (pcs, rcs, cts) = match flag {
        DegenerateFlag::None => (
            precision.score,
            recall.score,
            harmonic_cts(precision.score, recall.score),
        ),
        DegenerateFlag::BothEmpty => (1.0, 1.0, 1.0),
        DegenerateFlag::PredEmpty | DegenerateFlag::GtEmpty => (0.0, 0.0, 0.0),
    };
    let scores = Scores {
        pcs,
        rcs,
        cts,
        pred_total_len: precision.total_len,
        pred_matched_len: precision.matched_len,
        gt_total_len: recall.total_len,
        gt_matched_len: recall.matched_len,
        degenerate_flag: flag,
    };
    Ok(Evaluation {
        scores,
        gt_skeleton,
        pred_skeleton,
        gt,
        pred,
        gt_table,
        pred_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::PixelCoord;
    use crate::matching::SegmentMatch;
    use crate::skeleton::{SegmentKind, SkeletonSegment};

    fn decomp_with_lengths(lengths: &[f64]) -> SegmentDecomposition {
        let segments: Vec<SkeletonSegment> = lengths
            .iter()
            .enumerate()
            .map(|(id, &length)| SkeletonSegment {
                id,
                kind: SegmentKind::OpenPath,
                pixels: vec![PixelCoord::new(id, 0)],
                length,
            })
            .collect();
        SegmentDecomposition {
            width: lengths.len(),
            height: 1,
            total_length: lengths.iter().sum(),
            segments,
            junction_pixels: Vec::new(),
        }
    }

    fn table(matched: &[bool]) -> MatchTable {
        MatchTable {
            rows: matched
                .iter()
                .enumerate()
                .map(|(id, &m)| SegmentMatch {
                    segment_id: id,
                    matched: m,
                    overlap_ratio: if m { 1.0 } else { 0.0 },
                    candidate_ids: if m { vec![0] } else { vec![] },
                    covered_pixels: usize::from(m),
                    pixel_count: 1,
                })
                .collect(),
        }
    }

    fn hline(w: usize, h: usize, row: usize, cols: std::ops::RangeInclusive<usize>) -> BinaryMask {
        let mut m = BinaryMask::new(w, h);
        for x in cols {
            m.set(x, row, true);
        }
        m
    }

    #[test]
    fn pcs_examples() {
        let d = decomp_with_lengths(&[9.0, 3.0]);
        assert_eq!(compute_pcs(&table(&[true, true]), &d).unwrap().score, 1.0);
        let s = compute_pcs(&table(&[true, false]), &d).unwrap();
        assert_eq!(s.score, 0.75);
        assert_eq!((s.matched_len, s.total_len), (9.0, 12.0));
        assert_eq!(compute_pcs(&table(&[false, false]), &d).unwrap().score, 0.0);
    }

    #[test]
    fn rcs_examples() {
        let d = decomp_with_lengths(&[10.0, 10.0]);
        assert_eq!(compute_rcs(&table(&[true, true]), &d).unwrap().score, 1.0);
        assert_eq!(compute_rcs(&table(&[false, true]), &d).unwrap().score, 0.5);
        assert_eq!(compute_rcs(&table(&[false, false]), &d).unwrap().score, 0.0);
    }

    #[test]
    fn table_mismatch_is_contract_error() {
        let d = decomp_with_lengths(&[1.0, 2.0]);
        assert!(matches!(
            compute_pcs(&table(&[true]), &d),
            Err(CtsError::Contract(_))
        ));
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic_cts(1.0, 1.0), 1.0);
        assert!((harmonic_cts(1.0, 0.5) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(harmonic_cts(0.0, 0.0), 0.0);
        assert_eq!(harmonic_cts(0.0, 1.0), 0.0);
    }

    #[test]
    fn identity_and_translation() {
        let cfg = EvalConfig::default();
        let gt = hline(128, 128, 50, 10..=90);
        let s = evaluate(&gt, &gt, &cfg).unwrap();
        assert_eq!((s.pcs, s.rcs, s.cts), (1.0, 1.0, 1.0));
        assert_eq!(s.degenerate_flag, DegenerateFlag::None);
        assert_eq!(s.gt_total_len, 80.0);

        let near = evaluate(&gt, &hline(128, 128, 55, 10..=90), &cfg).unwrap();
        assert_eq!((near.pcs, near.rcs, near.cts), (1.0, 1.0, 1.0));
        let far = evaluate(&gt, &hline(128, 128, 75, 10..=90), &cfg).unwrap();
        assert_eq!((far.pcs, far.rcs, far.cts), (0.0, 0.0, 0.0));
    }

    #[test]
    fn degenerate_conventions() {
        let cfg = EvalConfig::default();
        let empty = BinaryMask::new(20, 20);
        let line = hline(20, 20, 5, 2..=15);
        let s = evaluate(&empty, &empty, &cfg).unwrap();
        assert_eq!(
            (s.pcs, s.rcs, s.cts, s.degenerate_flag),
            (1.0, 1.0, 1.0, DegenerateFlag::BothEmpty)
        );
        let s = evaluate(&line, &empty, &cfg).unwrap();
        assert_eq!(
            (s.pcs, s.rcs, s.cts, s.degenerate_flag),
            (0.0, 0.0, 0.0, DegenerateFlag::PredEmpty)
        );
        assert_eq!(s.gt_total_len, 13.0);
        let s = evaluate(&empty, &line, &cfg).unwrap();
        assert_eq!(
            (s.pcs, s.rcs, s.cts, s.degenerate_flag),
            (0.0, 0.0, 0.0, DegenerateFlag::GtEmpty)
        );
    }

    #[test]
    fn dimension_mismatch() {
        let err = evaluate(
            &BinaryMask::new(4, 4),
            &BinaryMask::new(4, 5),
            &EvalConfig::default(),
        );
        assert!(matches!(err, Err(CtsError::DimensionMismatch { .. })));
    }

    #[test]
    fn config_serde_round_trip() {
        let cfg = EvalConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"match\""));
        let back: EvalConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        let partial: EvalConfig = serde_json::from_str(r#"{"match":{"buffer_radius":4}}"#).unwrap();
        assert_eq!(partial.matching.buffer_radius, 4);
        assert_eq!(partial.matching.overlap_threshold, 0.5);
    }
}
