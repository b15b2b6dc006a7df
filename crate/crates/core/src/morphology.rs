//! Binary dilation and erosion with Euclidean disk structuring elements.
//!
//! A disk of radius `r` is the set of integer offsets with `dx² + dy² ≤ r²`. Because it
//! is convex along every row, it is stored as one symmetric half-width per `dy`, and
//! both operators reduce to counting ones over row intervals with prefix sums.
//! Pixels outside the raster are background for both operators.

use crate::mask::BinaryMask;

/// Digital Euclidean disk `{(dx, dy) : dx² + dy² ≤ radius²}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskElement {
    radius: usize,
    /// `half_widths[dy + radius]` is the largest `dx` with `dx² + dy² ≤ radius²`.
    half_widths: Vec<usize>,
}

impl DiskElement {
    pub fn new(radius: usize) -> Self {
        let r2 = radius * radius;
        let half_widths = (0..=2 * radius)
            .map(|row| {
                let dy = row.abs_diff(radius);
                let rem = r2 - dy * dy;
                let mut w = (rem as f64).sqrt() as usize;
                while w * w > rem {
                    w -= 1;
                }
                while (w + 1) * (w + 1) <= rem {
                    w += 1;
                }
                w
            })
            .collect();
        Self {
            radius,
            half_widths,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// `(dy, half_width)` for every row of the disk, top to bottom.
    pub fn rows(&self) -> impl Iterator<Item = (isize, usize)> + '_ {
        let r = self.radius as isize;
        self.half_widths
            .iter()
            .enumerate()
            .map(move |(i, &w)| (i as isize - r, w))
    }

    /// Every `(dx, dy)` offset of the element, row by row.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        self.rows()
            .flat_map(|(dy, w)| (-(w as isize)..=w as isize).map(move |dx| (dx, dy)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.half_widths.iter().map(|w| 2 * w + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Per-row prefix counts: `prefix[y * (w + 1) + x]` = ones in row `y` before column `x`.
struct RowPrefix {
    stride: usize,
    prefix: Vec<u32>,
}

impl RowPrefix {
    fn new(mask: &BinaryMask) -> Self {
        let (w, h) = mask.dims();
        let stride = w + 1;
        let mut prefix = vec![0u32; stride * h];
        for (y, row) in mask.pixels().chunks_exact(w.max(1)).take(h).enumerate() {
            let base = y * stride;
            for (x, &v) in row.iter().enumerate() {
                prefix[base + x + 1] = prefix[base + x] + v as u32;
            }
        }
        Self { stride, prefix }
    }

    /// Ones in row `y` over columns `lo..=hi`.
    #[inline]
    fn count(&self, y: usize, lo: usize, hi: usize) -> u32 {
        let base = y * self.stride;
        self.prefix[base + hi + 1] - self.prefix[base + lo]
    }
}

/// Output pixel `q` is set iff some set input pixel `p` has `q - p` in the disk.
pub fn dilate(mask: &BinaryMask, se: &DiskElement) -> BinaryMask {
    let (w, h) = mask.dims();
    if se.radius == 0 || w == 0 || h == 0 {
        return mask.clone();
    }
    let rows = RowPrefix::new(mask);
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let hit = se.rows().any(|(dy, half)| {
                let yy = y as isize + dy;
                if yy < 0 || yy >= h as isize {
                    return false;
                }
                let lo = x.saturating_sub(half);
                let hi = (x + half).min(w - 1);
                rows.count(yy as usize, lo, hi) > 0
            });
            if hit {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Output pixel `p` is set iff `p + o` is in bounds and set for every disk offset `o`.
pub fn erode(mask: &BinaryMask, se: &DiskElement) -> BinaryMask {
    let (w, h) = mask.dims();
    if se.radius == 0 || w == 0 || h == 0 {
        return mask.clone();
    }
    let rows = RowPrefix::new(mask);
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let keep = se.rows().all(|(dy, half)| {
                let yy = y as isize + dy;
                if yy < 0 || yy >= h as isize || x < half || x + half >= w {
                    return false;
                }
                rows.count(yy as usize, x - half, x + half) == (2 * half + 1) as u32
            });
            if keep {
                out.set(x, y, true);
            }
        }
    }
    out
}
