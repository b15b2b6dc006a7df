//! Optional mask cleanup before skeletonization: small-hole filling and
//! open/close smoothing. Everything here is off by default, and the default
//! configuration leaves both masks bit-identical.

use serde::{Deserialize, Serialize};

use crate::components::{connected_components, Connectivity};
use crate::mask::BinaryMask;
use crate::morphology::{dilate, erode, DiskElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothMode {
    #[default]
    None,
    Open,
    Close,
}

/// Which masks the preprocessing steps touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplyTo {
    #[default]
    PredictionOnly,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    /// Largest enclosed hole (in pixels) that gets filled; 0 disables filling.
    pub hole_area_threshold: usize,
    pub smooth_mode: SmoothMode,
    /// Disk radius for smoothing; 0 disables smoothing.
    pub smooth_radius: usize,
    pub apply_to: ApplyTo,
}

impl PreprocessConfig {
    pub fn is_identity(&self) -> bool {
        self.hole_area_threshold == 0
            && (self.smooth_mode == SmoothMode::None || self.smooth_radius == 0)
    }
}

/// Fills background regions that do not touch the image border and hold at most `max_area` pixels.
///
/// Background connectivity is 4, the dual of the 8-connected foreground, so a
/// cavity that leaks out only through a diagonal gap still counts as enclosed.
pub fn fill_holes(mask: &BinaryMask, max_area: usize) -> BinaryMask {
    if max_area == 0 {
        return mask.clone();
    }
    let background = connected_components(&mask.complement(), Connectivity::Four);
    let fill: Vec<bool> = background
        .components
        .iter()
        .map(|c| !c.touches_border && c.pixel_count <= max_area)
        .collect();
    let mut out = mask.clone();
    for (i, &label) in background.labels.iter().enumerate() {
        if label != 0 && fill[label as usize - 1] {
            let p = out.coord(i);
            out.set(p.x, p.y, true);
        }
    }
    out
}

/// Morphological opening or closing with a disk of `radius`.
///
/// Closing runs on a canvas padded by `radius` and is cropped back, so foreground
/// on the image border survives the erosion step and closing stays extensive.
pub fn smooth(mask: &BinaryMask, mode: SmoothMode, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let se = DiskElement::new(radius);
    match mode {
        SmoothMode::None => mask.clone(),
        SmoothMode::Open => dilate(&erode(mask, &se), &se),
        SmoothMode::Close => {
            let (w, h) = mask.dims();
            let padded = mask.translated(radius, radius, w + 2 * radius, h + 2 * radius);
            erode(&dilate(&padded, &se), &se).cropped(radius, radius, w, h)
        }
    }
}

fn apply(mask: &BinaryMask, cfg: &PreprocessConfig) -> BinaryMask {
    let filled = fill_holes(mask, cfg.hole_area_threshold);
    smooth(&filled, cfg.smooth_mode, cfg.smooth_radius)
}

/// Runs hole filling then smoothing on the prediction, and on the ground truth too
/// when `apply_to` is [`ApplyTo::Both`].
pub fn run_preprocess(
    gt: &BinaryMask,
    pred: &BinaryMask,
    cfg: &PreprocessConfig,
) -> (BinaryMask, BinaryMask) {
    if cfg.is_identity() {
        return (gt.clone(), pred.clone());
    }
    let gt_out = match cfg.apply_to {
        ApplyTo::PredictionOnly => gt.clone(),
        ApplyTo::Both => apply(gt, cfg),
    };
    (gt_out, apply(pred, cfg))
}
