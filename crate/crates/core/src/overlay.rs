//! Color-coded skeleton overlays.
//!
//! Ground-truth pixels are painted first and prediction pixels last, so where the
//! two skeletons coincide the prediction color shows.

use std::path::Path;

use image::{ImageFormat, Rgb, RgbImage};

use crate::error::{CtsError, Result};
use crate::io::image_write_error;
use crate::matching::MatchTable;
use crate::skeleton::SegmentDecomposition;

pub const BACKGROUND: Rgb<u8> = Rgb([0, 0, 0]);
pub const GT_MATCHED: Rgb<u8> = Rgb([0, 0, 255]);
pub const GT_UNMATCHED: Rgb<u8> = Rgb([255, 255, 0]);
pub const GT_JUNCTION: Rgb<u8> = Rgb([128, 128, 255]);
pub const PRED_MATCHED: Rgb<u8> = Rgb([0, 255, 0]);
pub const PRED_UNMATCHED: Rgb<u8> = Rgb([255, 0, 0]);
pub const PRED_JUNCTION: Rgb<u8> = Rgb([255, 128, 128]);

fn paint(
    img: &mut RgbImage,
    decomp: &SegmentDecomposition,
    table: &MatchTable,
    matched: Rgb<u8>,
    unmatched: Rgb<u8>,
    junction: Rgb<u8>,
) {
    for seg in &decomp.segments {
        let color = if table.is_matched(seg.id) {
            matched
        } else {
            unmatched
        };
        for p in &seg.pixels {
            img.put_pixel(p.x as u32, p.y as u32, color);
        }
    }
    for p in &decomp.junction_pixels {
        img.put_pixel(p.x as u32, p.y as u32, junction);
    }
}

/// Draws both skeletons, colored by match verdict, on a black canvas.
pub fn render_overlay(
    gt: &SegmentDecomposition,
    pred: &SegmentDecomposition,
    gt_table: &MatchTable,
    pred_table: &MatchTable,
) -> Result<RgbImage> {
    if gt.dims() != pred.dims() {
        return Err(CtsError::DimensionMismatch {
            left_width: gt.width,
            left_height: gt.height,
            right_width: pred.width,
            right_height: pred.height,
        });
    }
    let mut img = RgbImage::from_pixel(gt.width as u32, gt.height as u32, BACKGROUND);
    paint(
        &mut img,
        gt,
        gt_table,
        GT_MATCHED,
        GT_UNMATCHED,
        GT_JUNCTION,
    );
    paint(
        &mut img,
        pred,
        pred_table,
        PRED_MATCHED,
        PRED_UNMATCHED,
        PRED_JUNCTION,
    );
    Ok(img)
}

pub fn save_overlay(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|e| image_write_error(path, e))
}
