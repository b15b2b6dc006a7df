//! Buffered matching of one decomposition's segments against another's.
//!
//! For a subject segment, the candidates are the reference segments that come
//! within Euclidean distance `r` of it. Their pixels are merged into one mask and
//! dilated by a disk of radius `r`. The overlap ratio is the fraction of subject
//! pixels inside that buffer, so several fragments can cover one subject segment
//! together.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{CtsError, Result};
use crate::mask::BinaryMask;
use crate::morphology::{dilate, DiskElement};
use crate::skeleton::{SegmentDecomposition, SkeletonSegment};

pub const DEFAULT_BUFFER_RADIUS: usize = 10;
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    /// Buffer radius `r` in pixels; must be positive.
    pub buffer_radius: usize,
    /// Minimum covered fraction `θ ∈ [0, 1]`; the comparison is inclusive.
    pub overlap_threshold: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            buffer_radius: DEFAULT_BUFFER_RADIUS,
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.buffer_radius == 0 {
            return Err(CtsError::InvalidConfig(
                "buffer radius must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.overlap_threshold) {
            return Err(CtsError::InvalidConfig(format!(
                "overlap threshold {} is outside [0, 1]",
                self.overlap_threshold
            )));
        }
        Ok(())
    }
}

/// Verdict for one subject segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentMatch {
    pub segment_id: usize,
    pub matched: bool,
    pub overlap_ratio: f64,
    /// Reference segment ids within the buffer radius, ascending.
    pub candidate_ids: Vec<usize>,
    pub covered_pixels: usize,
    pub pixel_count: usize,
}

impl SegmentMatch {
    fn new(segment: &SkeletonSegment, candidates: Vec<usize>, covered: usize, theta: f64) -> Self {
        let n = segment.pixels.len();
        let overlap_ratio = if n == 0 {
            0.0
        } else {
            covered as f64 / n as f64
        };
        Self {
            segment_id: segment.id,
            matched: !candidates.is_empty() && overlap_ratio >= theta,
            overlap_ratio,
            candidate_ids: candidates,
            covered_pixels: covered,
            pixel_count: n,
        }
    }
}

/// One row per subject segment, in segment id order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MatchTable {
    pub rows: Vec<SegmentMatch>,
}

impl MatchTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, segment_id: usize) -> Option<&SegmentMatch> {
        self.rows
            .get(segment_id)
            .filter(|r| r.segment_id == segment_id)
    }

    pub fn is_matched(&self, segment_id: usize) -> bool {
        self.get(segment_id).is_some_and(|r| r.matched)
    }
}

/// Reference labels read through a disk stamped at every subject pixel, which is
/// the dilation of the subject segment probed at reference pixels.
fn stamp_candidates(
    subject: &SkeletonSegment,
    labels: &[u32],
    width: usize,
    height: usize,
    disk: &DiskElement,
) -> Vec<usize> {
    let mut found = BTreeSet::new();
    for p in &subject.pixels {
        for (dy, half) in disk.rows() {
            let y = p.y as isize + dy;
            if y < 0 || y >= height as isize {
                continue;
            }
            let row = y as usize * width;
            let lo = p.x.saturating_sub(half);
            let hi = (p.x + half).min(width - 1);
            for &label in &labels[row + lo..=row + hi] {
                if label != 0 {
                    found.insert(label as usize - 1);
                }
            }
        }
    }
    found.into_iter().collect()
}

fn check_dims(subject: (usize, usize), reference: &SegmentDecomposition) -> Result<()> {
    if subject != reference.dims() {
        return Err(CtsError::DimensionMismatch {
            left_width: subject.0,
            left_height: subject.1,
            right_width: reference.width,
            right_height: reference.height,
        });
    }
    Ok(())
}

/// Reference segment ids having a pixel within Euclidean distance `radius` of a subject pixel.
pub fn candidates_for(
    subject: &SkeletonSegment,
    reference: &SegmentDecomposition,
    radius: usize,
) -> Vec<usize> {
    let (w, h) = reference.dims();
    if w == 0 || h == 0 {
        return Vec::new();
    }
    stamp_candidates(
        subject,
        &reference.label_map(),
        w,
        h,
        &DiskElement::new(radius),
    )
}

/// Matches one subject segment against the merged buffer of its candidates.
pub fn match_one(
    subject: &SkeletonSegment,
    reference: &SegmentDecomposition,
    cfg: &MatchConfig,
) -> Result<SegmentMatch> {
    cfg.validate()?;
    let (w, h) = reference.dims();
    if let Some(p) = subject.pixels.iter().find(|p| p.x >= w || p.y >= h) {
        return Err(CtsError::Contract(format!(
            "subject pixel {:?} lies outside the {w}x{h} reference raster",
            p.yx()
        )));
    }
    let candidates = candidates_for(subject, reference, cfg.buffer_radius);
    let mut merged = BinaryMask::new(w, h);
    for &id in &candidates {
        for p in &reference.segments[id].pixels {
            merged.set(p.x, p.y, true);
        }
    }
    let buffer = dilate(&merged, &DiskElement::new(cfg.buffer_radius));
    let covered = subject
        .pixels
        .iter()
        .filter(|p| buffer.get(p.x, p.y))
        .count();
    Ok(SegmentMatch::new(
        subject,
        candidates,
        covered,
        cfg.overlap_threshold,
    ))
}

/// Matches every subject segment against the reference decomposition.
///
/// Equivalent to calling [`match_one`] per segment. Reference segments that are not
/// candidates lie farther than `r` from every subject pixel, so they add nothing to
/// the buffer at subject pixels. That lets one dilation of all reference segments
/// serve every subject segment.
pub fn match_all(
    subject: &SegmentDecomposition,
    reference: &SegmentDecomposition,
    cfg: &MatchConfig,
) -> Result<MatchTable> {
    cfg.validate()?;
    check_dims(subject.dims(), reference)?;
    if subject.is_empty() {
        return Ok(MatchTable::default());
    }
    let (w, h) = reference.dims();
    let disk = DiskElement::new(cfg.buffer_radius);
    let labels = reference.label_map();
    let buffer = dilate(&reference.segment_mask(), &disk);
    let rows = subject
        .segments
        .iter()
        .map(|seg| {
            let candidates = stamp_candidates(seg, &labels, w, h, &disk);
            let covered = seg.pixels.iter().filter(|p| buffer.get(p.x, p.y)).count();
            SegmentMatch::new(seg, candidates, covered, cfg.overlap_threshold)
        })
        .collect();
    Ok(MatchTable { rows })
}
