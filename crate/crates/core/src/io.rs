//! PNG / binary PGM (P5) reading and PNG writing.
//!
//! Gray images are thresholded directly. RGB images go through integer luminance
//! `round(0.299 R + 0.587 G + 0.114 B)` first, so every platform binarizes identically.
//! An alpha channel, if present, is ignored.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageFormat, ImageReader, Luma};

use crate::error::{CtsError, Result};
use crate::mask::BinaryMask;

pub const DEFAULT_BINARIZE_THRESHOLD: u8 = 128;

/// Integer luminance, `round(0.299 R + 0.587 G + 0.114 B)` without touching floats.
#[inline]
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    // weights sum to 1000 so the result is at most 255
    ((weighted + 500) / 1000) as u8
}

/// Reads a PNG or P5 PGM file and binarizes it: pixel = 1 iff intensity ≥ `threshold`.
pub fn load_mask(path: impl AsRef<Path>, threshold: u8) -> Result<BinaryMask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CtsError::io(path, e))?;
    decode_mask(&bytes, threshold).map_err(|reason| CtsError::format(path, reason))
}

/// Decodes in-memory PNG / P5 PGM bytes.
pub fn decode_mask(bytes: &[u8], threshold: u8) -> std::result::Result<BinaryMask, String> {
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| e.to_string())?;
    match reader.format() {
        Some(ImageFormat::Png) => {}
        Some(ImageFormat::Pnm) if bytes.starts_with(b"P5") => {}
        Some(ImageFormat::Pnm) => return Err("only binary PGM (P5) is supported".into()),
        Some(other) => return Err(format!("{other:?} images are not supported")),
        None => return Err("unrecognized image format".into()),
    }
    let image = reader.decode().map_err(|e| e.to_string())?;
    binarize(&image, threshold)
}

fn binarize(image: &DynamicImage, threshold: u8) -> std::result::Result<BinaryMask, String> {
    let (width, height) = (image.width() as usize, image.height() as usize);
    let pixels: Vec<u8> = match image {
        DynamicImage::ImageLuma8(img) => img
            .pixels()
            .map(|p| u8::from(p.0[0] >= threshold))
            .collect(),
        DynamicImage::ImageLumaA8(img) => img
            .pixels()
            .map(|p| u8::from(p.0[0] >= threshold))
            .collect(),
        DynamicImage::ImageRgb8(img) => img
            .pixels()
            .map(|p| u8::from(luminance(p.0[0], p.0[1], p.0[2]) >= threshold))
            .collect(),
        DynamicImage::ImageRgba8(img) => img
            .pixels()
            .map(|p| u8::from(luminance(p.0[0], p.0[1], p.0[2]) >= threshold))
            .collect(),
        other => {
            return Err(format!(
                "unsupported pixel layout {:?}; expected 8-bit gray or RGB",
                other.color()
            ))
        }
    };
    BinaryMask::from_pixels(width, height, pixels).map_err(|e| e.to_string())
}

/// Converts a mask to an 8-bit gray image (0 / 255).
pub fn mask_to_gray(mask: &BinaryMask) -> GrayImage {
    GrayImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        Luma([if mask.get(x as usize, y as usize) {
            255
        } else {
            0
        }])
    })
}

/// Writes a mask as an 8-bit gray PNG with foreground 255.
pub fn save_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    mask_to_gray(mask)
        .save_with_format(path, ImageFormat::Png)
        .map_err(|e| image_write_error(path, e))
}

pub(crate) fn image_write_error(path: &Path, err: image::ImageError) -> CtsError {
    match err {
        image::ImageError::IoError(e) => CtsError::io(path, e),
        other => CtsError::format(path, other.to_string()),
    }
}
