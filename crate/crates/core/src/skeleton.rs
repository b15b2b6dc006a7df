//! Zhang–Suen thinning and decomposition of the resulting skeleton into
//! junction-delimited segments.
//!
//! Neighbors of a pixel are packed into one byte, bit `k` holding `P(k+2)` in the
//! usual clockwise-from-north numbering:
//!
//! ```text
//!   P9 P2 P3        bit7 bit0 bit1
//!   P8 p  P4   ->   bit6  p   bit2
//!   P7 P6 P5        bit5 bit4 bit3
//! ```
//!
//! so each sub-iteration's deletion test is a single table lookup.

use serde::Serialize;

use crate::error::{CtsError, Result};
use crate::mask::{BinaryMask, PixelCoord};

const P2: u8 = 1 << 0;
const P4: u8 = 1 << 2;
const P6: u8 = 1 << 4;
const P8: u8 = 1 << 6;

const fn deletable(code: u8, first_pass: bool) -> bool {
    let b = code.count_ones();
    if b < 2 || b > 6 {
        return false;
    }
    // 0 -> 1 transitions around P2, P3, ..., P9, P2
    let rotated = code.rotate_right(1);
    let transitions = (!rotated & code).count_ones();
    if transitions != 1 {
        return false;
    }
    let (a, b) = if first_pass {
        (P2 | P4 | P6, P4 | P6 | P8)
    } else {
        (P2 | P4 | P8, P2 | P6 | P8)
    };
    code & a != a && code & b != b
}

const fn build_table(first_pass: bool) -> [bool; 256] {
    let mut table = [false; 256];
    let mut code = 0;
    while code < 256 {
        table[code] = deletable(code as u8, first_pass);
        code += 1;
    }
    table
}

static FIRST_PASS: [bool; 256] = build_table(true);
static SECOND_PASS: [bool; 256] = build_table(false);

/// Raster with a one-pixel zero frame so neighbor reads never leave the buffer.
struct PaddedRaster {
    width: usize,
    stride: usize,
    cells: Vec<u8>,
}

impl PaddedRaster {
    fn new(mask: &BinaryMask) -> Self {
        let (w, h) = mask.dims();
        let stride = w + 2;
        let mut cells = vec![0u8; stride * (h + 2)];
        for p in mask.iter_ones() {
            cells[(p.y + 1) * stride + p.x + 1] = 1;
        }
        Self {
            width: w,
            stride,
            cells,
        }
    }

    #[inline]
    fn neighbor_code(&self, i: usize) -> u8 {
        let s = self.stride;
        let c = &self.cells;
        c[i - s]
            | c[i - s + 1] << 1
            | c[i + 1] << 2
            | c[i + s + 1] << 3
            | c[i + s] << 4
            | c[i + s - 1] << 5
            | c[i - 1] << 6
            | c[i - s - 1] << 7
    }

    fn active(&self) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// One sub-iteration; returns how many pixels were deleted.
    fn sub_iteration(&mut self, active: &mut Vec<usize>, table: &[bool; 256]) -> usize {
        let flagged: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| table[self.neighbor_code(i) as usize])
            .collect();
        for &i in &flagged {
            self.cells[i] = 0;
        }
        if !flagged.is_empty() {
            active.retain(|&i| self.cells[i] != 0);
        }
        flagged.len()
    }

    fn into_mask(self, height: usize) -> BinaryMask {
        let mut out = BinaryMask::new(self.width, height);
        for y in 0..height {
            for x in 0..self.width {
                if self.cells[(y + 1) * self.stride + x + 1] != 0 {
                    out.set(x, y, true);
                }
            }
        }
        out
    }
}

/// One-pixel-wide skeleton, stored as a mask over the source raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    mask: BinaryMask,
}

impl Skeleton {
    /// Wraps an already-thin mask. [`decompose`] rejects it if it is not a thinning fixed point.
    pub fn from_mask(mask: BinaryMask) -> Self {
        Self { mask }
    }

    pub fn as_mask(&self) -> &BinaryMask {
        &self.mask
    }

    pub fn into_mask(self) -> BinaryMask {
        self.mask
    }

    pub fn dims(&self) -> (usize, usize) {
        self.mask.dims()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        self.mask.get(p.x, p.y)
    }

    pub fn pixels(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.mask.iter_ones()
    }

    /// True when one full Zhang–Suen iteration would delete nothing.
    pub fn is_fixed_point(&self) -> bool {
        let mut raster = PaddedRaster::new(&self.mask);
        let mut active = raster.active();
        raster.sub_iteration(&mut active, &FIRST_PASS) == 0
            && raster.sub_iteration(&mut active, &SECOND_PASS) == 0
    }
}

/// Classic two-sub-iteration Zhang–Suen thinning; out-of-bounds neighbors read as 0.
pub fn thin(mask: &BinaryMask) -> Skeleton {
    let mut raster = PaddedRaster::new(mask);
    let mut active = raster.active();
    loop {
        let deleted = raster.sub_iteration(&mut active, &FIRST_PASS)
            + raster.sub_iteration(&mut active, &SECOND_PASS);
        if deleted == 0 {
            break;
        }
    }
    Skeleton {
        mask: raster.into_mask(mask.height()),
    }
}

/// Role of a skeleton pixel by its number of skeleton neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PixelClass {
    Isolated,
    Endpoint,
    Regular,
    Junction,
}

impl PixelClass {
    pub fn from_neighbor_count(n: u32) -> Self {
        match n {
            0 => PixelClass::Isolated,
            1 => PixelClass::Endpoint,
            2 => PixelClass::Regular,
            _ => PixelClass::Junction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelClassMap {
    width: usize,
    classes: Vec<Option<PixelClass>>,
}

impl PixelClassMap {
    /// `None` for pixels outside the skeleton.
    pub fn get(&self, p: PixelCoord) -> Option<PixelClass> {
        self.classes[p.y * self.width + p.x]
    }

    pub fn iter(&self) -> impl Iterator<Item = (PixelCoord, PixelClass)> + '_ {
        let w = self.width;
        self.classes
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.map(|c| (PixelCoord::new(i % w, i / w), c)))
    }
}

/// Neighbor offsets in `P2..P9` order, matching the bits of a neighbor code.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Drops diagonal neighbors that are already reachable through a shared
/// 4-neighbor (mixed adjacency). Connectivity is the same as 8-adjacency, but a
/// 4-connected corner or staircase no longer looks like a three-way branch.
#[inline]
fn link_code(code: u8) -> u8 {
    let orth = code & 0b0101_0101;
    let mut out = orth;
    for diag in [1u32, 3, 5, 7] {
        let before = 1u8 << (diag - 1);
        let after = 1u8 << ((diag + 1) % 8);
        if code & (1 << diag) != 0 && orth & (before | after) == 0 {
            out |= 1 << diag;
        }
    }
    out
}

/// Skeleton pixel graph under mixed adjacency.
struct SkeletonGraph<'a> {
    mask: &'a BinaryMask,
    raster: PaddedRaster,
}

impl<'a> SkeletonGraph<'a> {
    fn new(mask: &'a BinaryMask) -> Self {
        Self {
            mask,
            raster: PaddedRaster::new(mask),
        }
    }

    fn links(&self, p: PixelCoord) -> u8 {
        let i = (p.y + 1) * self.raster.stride + p.x + 1;
        link_code(self.raster.neighbor_code(i))
    }

    fn degree(&self, p: PixelCoord) -> u32 {
        self.links(p).count_ones()
    }

    /// Linked neighbors of `p`, sorted by `(y, x)`.
    fn neighbors(&self, p: PixelCoord) -> Vec<PixelCoord> {
        let links = self.links(p);
        let mut out: Vec<PixelCoord> = RING
            .iter()
            .enumerate()
            .filter(|(bit, _)| links & (1 << bit) != 0)
            .map(|(_, &(dx, dy))| {
                PixelCoord::new((p.x as isize + dx) as usize, (p.y as isize + dy) as usize)
            })
            .collect();
        out.sort_by_key(|q| q.yx());
        out
    }

    /// Connected groups of the pixels selected by `keep`, following links only
    /// between selected pixels. Each group lists raster indices in ascending order.
    fn groups(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let w = self.mask.width();
        let mut seen = vec![false; keep.len()];
        let mut groups = Vec::new();
        for start in 0..keep.len() {
            if !keep[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut group = Vec::new();
            while let Some(i) = stack.pop() {
                group.push(i);
                for q in self.neighbors(self.mask.coord(i)) {
                    let j = q.y * w + q.x;
                    if keep[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            group.sort_unstable();
            groups.push(group);
        }
        groups
    }
}

/// Classifies each skeleton pixel by its neighbor count.
///
/// Neighbors are 8-adjacent skeleton pixels, except that a diagonal neighbor is
/// not counted when the two pixels already share a 4-neighbor in the skeleton.
pub fn classify(skel: &Skeleton) -> PixelClassMap {
    let graph = SkeletonGraph::new(&skel.mask);
    let w = skel.mask.width();
    let classes = (0..skel.mask.pixels().len())
        .map(|i| {
            let p = PixelCoord::new(i % w, i / w);
            skel.contains(p)
                .then(|| PixelClass::from_neighbor_count(graph.degree(p)))
        })
        .collect();
    PixelClassMap { width: w, classes }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    OpenPath,
    Loop,
    IsolatedPixel,
    JunctionCluster,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkeletonSegment {
    pub id: usize,
    pub kind: SegmentKind,
    /// Ordered path for paths and loops; raster order for junction clusters.
    pub pixels: Vec<PixelCoord>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentDecomposition {
    pub width: usize,
    pub height: usize,
    pub segments: Vec<SkeletonSegment>,
    pub junction_pixels: Vec<PixelCoord>,
    pub total_length: f64,
}

impl SegmentDecomposition {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            segments: Vec::new(),
            junction_pixels: Vec::new(),
            total_length: 0.0,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Per-pixel `segment id + 1`, 0 where no segment lies.
    pub fn label_map(&self) -> Vec<u32> {
        let mut labels = vec![0u32; self.width * self.height];
        for seg in &self.segments {
            for p in &seg.pixels {
                labels[p.y * self.width + p.x] = seg.id as u32 + 1;
            }
        }
        labels
    }

    /// Union of all segment pixels (junction pixels excluded).
    pub fn segment_mask(&self) -> BinaryMask {
        let mut mask = BinaryMask::new(self.width, self.height);
        for p in self.segments.iter().flat_map(|s| &s.pixels) {
            mask.set(p.x, p.y, true);
        }
        mask
    }
}

/// Chain length: 1 per orthogonal step, √2 per diagonal step, loops closed,
/// single pixels counted as 1, junction clusters as `max(1, n - 1)`.
pub fn segment_length(kind: SegmentKind, pixels: &[PixelCoord]) -> f64 {
    let step = |a: PixelCoord, b: PixelCoord| -> f64 {
        if a.x != b.x && a.y != b.y {
            std::f64::consts::SQRT_2
        } else {
            1.0
        }
    };
    match kind {
        SegmentKind::IsolatedPixel => 1.0,
        SegmentKind::JunctionCluster => (pixels.len().saturating_sub(1)).max(1) as f64,
        SegmentKind::OpenPath | SegmentKind::Loop => {
            let mut total = 0.0;
            for pair in pixels.windows(2) {
                total += step(pair[0], pair[1]);
            }
            if kind == SegmentKind::Loop && pixels.len() > 1 {
                total += step(pixels[pixels.len() - 1], pixels[0]);
            }
            total.max(1.0)
        }
    }
}

/// Splits a thinning fixed point into segments delimited by junction pixels.
///
/// Junction pixels (3 or more neighbors, see [`classify`]) are removed and every
/// connected group of what remains becomes one segment. Each remaining pixel has
/// at most two neighbors, so groups are simple paths, simple cycles or single
/// pixels. Junction groups that touch no segment become `JunctionCluster`
/// segments, so a nonempty skeleton always yields at least one segment.
/// Segment ids follow the raster order of each segment's first pixel.
pub fn decompose(skel: &Skeleton) -> Result<SegmentDecomposition> {
    if !skel.is_fixed_point() {
        return Err(CtsError::Contract(
            "decompose requires a thinning fixed point".into(),
        ));
    }
    let mask = &skel.mask;
    let (w, h) = mask.dims();
    let graph = SkeletonGraph::new(mask);

    let mut is_junction = vec![false; w * h];
    let mut is_remainder = vec![false; w * h];
    for p in mask.iter_ones() {
        if graph.degree(p) >= 3 {
            is_junction[p.y * w + p.x] = true;
        } else {
            is_remainder[p.y * w + p.x] = true;
        }
    }

    let mut pending: Vec<(usize, SegmentKind, Vec<PixelCoord>)> = Vec::new();
    for group in graph.groups(&is_remainder) {
        let (kind, path) = trace_group(&graph, &group)?;
        pending.push((group[0], kind, path));
    }

    let mut junction_pixels = Vec::new();
    for group in graph.groups(&is_junction) {
        let pixels: Vec<PixelCoord> = group.iter().map(|&i| mask.coord(i)).collect();
        let touches_segment = pixels.iter().any(|&p| {
            graph
                .neighbors(p)
                .iter()
                .any(|q| is_remainder[q.y * w + q.x])
        });
        if touches_segment {
            junction_pixels.extend(pixels);
        } else {
            pending.push((group[0], SegmentKind::JunctionCluster, pixels));
        }
    }
    junction_pixels.sort_by_key(|p| p.yx());
    pending.sort_by_key(|(first, _, _)| *first);

    let mut total_length = 0.0;
    let segments = pending
        .into_iter()
        .enumerate()
        .map(|(id, (_, kind, pixels))| {
            let length = segment_length(kind, &pixels);
            total_length += length;
            SkeletonSegment {
                id,
                kind,
                pixels,
                length,
            }
        })
        .collect();

    Ok(SegmentDecomposition {
        width: w,
        height: h,
        segments,
        junction_pixels,
        total_length,
    })
}

/// Orders one non-junction group. `group` holds raster indices in ascending order.
fn trace_group(graph: &SkeletonGraph, group: &[usize]) -> Result<(SegmentKind, Vec<PixelCoord>)> {
    let mask = graph.mask;
    let w = mask.width();
    if group.len() == 1 {
        return Ok((SegmentKind::IsolatedPixel, vec![mask.coord(group[0])]));
    }
    let member = |q: &PixelCoord| group.binary_search(&(q.y * w + q.x)).is_ok();
    let local = |p: PixelCoord| -> Vec<PixelCoord> {
        graph
            .neighbors(p)
            .into_iter()
            .filter(|q| member(q))
            .collect()
    };

    // raster order is (y, x) order, so the first match is the smallest endpoint
    let endpoint = group
        .iter()
        .map(|&i| mask.coord(i))
        .find(|&p| local(p).len() == 1);
    let (kind, start) = match endpoint {
        Some(p) => (SegmentKind::OpenPath, p),
        None => (SegmentKind::Loop, mask.coord(group[0])),
    };

    let mut path = Vec::with_capacity(group.len());
    path.push(start);
    let mut prev: Option<PixelCoord> = None;
    let mut cur = start;
    while path.len() < group.len() {
        let Some(next) = local(cur)
            .into_iter()
            .find(|&q| Some(q) != prev && q != start)
        else {
            break;
        };
        path.push(next);
        prev = Some(cur);
        cur = next;
    }
    if path.len() != group.len() {
        return Err(CtsError::Contract(format!(
            "group at {:?} is not a simple path or cycle",
            start.yx()
        )));
    }
    Ok((kind, path))
}
