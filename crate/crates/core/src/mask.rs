//! Binary raster representation shared by every stage of the pipeline.

use crate::error::{CtsError, Result};

/// A pixel position: `x` is the column (left to right), `y` the row (top to bottom).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl PixelCoord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    /// Raster-scan ordering key: row first, then column.
    pub const fn yx(self) -> (usize, usize) {
        (self.y, self.x)
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist2(self, other: PixelCoord) -> u64 {
        let dx = self.x.abs_diff(other.x) as u64;
        let dy = self.y.abs_diff(other.y) as u64;
        dx * dx + dy * dy
    }

    /// True when the two coordinates are distinct and touch under 8-connectivity.
    pub fn is_8_adjacent(self, other: PixelCoord) -> bool {
        self != other && self.x.abs_diff(other.x) <= 1 && self.y.abs_diff(other.y) <= 1
    }
}

/// Row-major raster of `{0, 1}` values, 1 meaning foreground (crack).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryMask {
    /// All-background mask.
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    /// Builds a mask from row-major `{0,1}` values, rejecting anything else.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(CtsError::Contract(format!(
                "pixel buffer has {} values, expected {}x{}={}",
                pixels.len(),
                width,
                height,
                width * height
            )));
        }
        if let Some(bad) = pixels.iter().find(|&&v| v > 1) {
            return Err(CtsError::Contract(format!(
                "mask value {bad} is not 0 or 1"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds a mask treating every nonzero element as foreground.
    pub fn from_nonzero<T>(width: usize, height: usize, values: &[T]) -> Result<Self>
    where
        T: Copy + Default + PartialEq,
    {
        if values.len() != width * height {
            return Err(CtsError::Contract(format!(
                "array has {} elements, expected {}x{}={}",
                values.len(),
                width,
                height,
                width * height
            )));
        }
        let zero = T::default();
        Ok(Self {
            width,
            height,
            pixels: values.iter().map(|&v| u8::from(v != zero)).collect(),
        })
    }

    /// Parses an ASCII picture: one string per row, `#`/`1` foreground, anything else background.
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut mask = Self::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            assert_eq!(row.chars().count(), width, "ragged ascii mask");
            for (x, c) in row.chars().enumerate() {
                if c == '#' || c == '1' {
                    mask.set(x, y, true);
                }
            }
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coord(&self, index: usize) -> PixelCoord {
        PixelCoord::new(index % self.width, index / self.width)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x] != 0
    }

    /// Reads a signed position; anything outside the raster is background.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.pixels[y as usize * self.width + x as usize] != 0
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let i = y * self.width + x;
        self.pixels[i] = u8::from(value);
    }

    pub fn count_ones(&self) -> usize {
        self.pixels.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.iter().all(|&v| v == 0)
    }

    /// Foreground coordinates in raster-scan order.
    pub fn iter_ones(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        let width = self.width;
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(i, _)| PixelCoord::new(i % width, i / width))
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| v ^ 1).collect(),
        }
    }

    /// Pixelwise `self ⊆ other`. Masks of different size are never subsets.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.pixels.iter().zip(&other.pixels).all(|(&a, &b)| a <= b)
    }

    pub fn union(&self, other: &BinaryMask) -> Result<Self> {
        self.ensure_same_dims(other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .zip(&other.pixels)
                .map(|(&a, &b)| a | b)
                .collect(),
        })
    }

    pub fn ensure_same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(CtsError::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            });
        }
        Ok(())
    }

    /// Copies the mask into a larger canvas at offset `(dx, dy)`.
    pub fn translated(&self, dx: usize, dy: usize, width: usize, height: usize) -> Self {
        assert!(self.width + dx <= width && self.height + dy <= height);
        let mut out = Self::new(width, height);
        for p in self.iter_ones() {
            out.set(p.x + dx, p.y + dy, true);
        }
        out
    }

    /// The `width × height` window starting at `(x0, y0)`.
    pub fn cropped(&self, x0: usize, y0: usize, width: usize, height: usize) -> Self {
        assert!(x0 + width <= self.width && y0 + height <= self.height);
        let mut pixels = Vec::with_capacity(width * height);
        for y in y0..y0 + height {
            let start = y * self.width + x0;
            pixels.extend_from_slice(&self.pixels[start..start + width]);
        }
        Self {
            width,
            height,
            pixels,
        }
    }
}
