//! Shared fixtures and independent reference implementations for the integration tests.
#![allow(dead_code)]

use crack_topology::mask::{BinaryMask, PixelCoord};
use crack_topology::matching::{MatchConfig, MatchTable};
use crack_topology::scoring::{DegenerateFlag, Scores};
use crack_topology::skeleton::{SegmentDecomposition, SegmentKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn hline(w: usize, h: usize, row: usize, cols: std::ops::RangeInclusive<usize>) -> BinaryMask {
    let mut m = BinaryMask::new(w, h);
    for x in cols {
        m.set(x, row, true);
    }
    m
}

pub fn rect(m: &mut BinaryMask, x0: usize, y0: usize, w: usize, h: usize) {
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            m.set(x, y, true);
        }
    }
}

fn stamp(m: &mut BinaryMask, cx: f64, cy: f64, radius: f64) {
    let r = radius.ceil() as isize;
    let (x0, y0) = (cx.round() as isize, cy.round() as isize);
    for dy in -r..=r {
        for dx in -r..=r {
            let (x, y) = (x0 + dx, y0 + dy);
            if (dx * dx + dy * dy) as f64 <= radius * radius
                && x >= 0
                && y >= 0
                && (x as usize) < m.width()
                && (y as usize) < m.height()
            {
                m.set(x as usize, y as usize, true);
            }
        }
    }
}

/// Meandering stroke of `steps` unit steps; returns the visited centre points.
pub fn walk(
    m: &mut BinaryMask,
    rng: &mut ChaCha8Rng,
    start: (f64, f64),
    heading: f64,
    steps: usize,
    radius: f64,
) -> Vec<(f64, f64)> {
    let (w, h) = (m.width() as f64, m.height() as f64);
    let (mut x, mut y) = start;
    let mut angle = heading;
    let mut points = Vec::with_capacity(steps);
    for _ in 0..steps {
        stamp(m, x, y, radius);
        points.push((x, y));
        angle += rng.random_range(-0.25..0.25);
        let (nx, ny) = (x + angle.cos(), y + angle.sin());
        if nx < 2.0 || ny < 2.0 || nx > w - 3.0 || ny > h - 3.0 {
            angle = (h / 2.0 - y).atan2(w / 2.0 - x);
            continue;
        }
        x = nx;
        y = ny;
    }
    points
}

pub fn random_walk_crack(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    let mut m = BinaryMask::new(w, h);
    let start = (
        rng.random_range(0.2..0.4) * w as f64,
        rng.random_range(0.2..0.8) * h as f64,
    );
    let heading = rng.random_range(-0.6..0.6);
    let radius = rng.random_range(0.5..2.5);
    walk(
        &mut m,
        rng,
        start,
        heading,
        (w.min(h) as f64 * 0.8) as usize,
        radius,
    );
    m
}

pub fn branched_crack(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    let mut m = BinaryMask::new(w, h);
    let radius = rng.random_range(0.5..2.0);
    let start = (0.15 * w as f64, rng.random_range(0.3..0.7) * h as f64);
    let heading = rng.random_range(-0.3..0.3);
    let trunk = walk(
        &mut m,
        rng,
        start,
        heading,
        (w as f64 * 0.7) as usize,
        radius,
    );
    let branches = rng.random_range(1..4);
    for _ in 0..branches {
        let from = trunk[rng.random_range(trunk.len() / 4..trunk.len())];
        let heading = rng.random_range(0.6..2.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        walk(
            &mut m,
            rng,
            from,
            heading,
            (h as f64 * 0.35) as usize,
            radius * 0.8,
        );
    }
    m
}

pub fn loop_crack(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    let mut m = BinaryMask::new(w, h);
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let (rx, ry) = (
        rng.random_range(0.2..0.35) * w as f64,
        rng.random_range(0.2..0.35) * h as f64,
    );
    let radius = rng.random_range(0.5..2.0);
    let n = ((rx + ry) * 4.0) as usize;
    for i in 0..n {
        let t = i as f64 / n as f64 * std::f64::consts::TAU;
        stamp(&mut m, cx + rx * t.cos(), cy + ry * t.sin(), radius);
    }
    if rng.random_bool(0.7) {
        walk(
            &mut m,
            rng,
            (cx + rx, cy),
            0.0,
            (w as f64 * 0.3) as usize,
            radius,
        );
    }
    m
}

/// Crack-like corpus mask, cycling through the three generators.
pub fn crack_mask(rng: &mut ChaCha8Rng, kind: usize, w: usize, h: usize) -> BinaryMask {
    match kind % 3 {
        0 => random_walk_crack(rng, w, h),
        1 => branched_crack(rng, w, h),
        _ => loop_crack(rng, w, h),
    }
}

/// A plausible prediction for `gt`: shifted, partly erased, maybe with a spurious stroke,
/// or an unrelated crack altogether.
pub fn perturbed(rng: &mut ChaCha8Rng, gt: &BinaryMask, kind: usize) -> BinaryMask {
    let (w, h) = gt.dims();
    if rng.random_bool(0.25) {
        return crack_mask(rng, kind + 1, w, h);
    }
    let (dx, dy) = (rng.random_range(-6i32..=6), rng.random_range(-6i32..=6));
    let mut out = BinaryMask::new(w, h);
    for p in gt.iter_ones() {
        let (x, y) = (p.x as i32 + dx, p.y as i32 + dy);
        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
            out.set(x as usize, y as usize, true);
        }
    }
    for _ in 0..rng.random_range(0..3) {
        let (x0, y0) = (rng.random_range(0..w), rng.random_range(0..h));
        for y in y0..(y0 + 12).min(h) {
            for x in x0..(x0 + 12).min(w) {
                out.set(x, y, false);
            }
        }
    }
    if rng.random_bool(0.4) {
        let start = (
            rng.random_range(4.0..w as f64 - 4.0),
            rng.random_range(4.0..h as f64 - 4.0),
        );
        let heading = rng.random_range(-3.0..3.0);
        walk(&mut out, rng, start, heading, w / 3, 1.0);
    }
    out
}

/// Textbook Zhang–Suen on a zero-padded grid, written without lookup tables.
pub fn textbook_zhang_suen(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut g = vec![vec![0u8; w + 2]; h + 2];
    for p in mask.iter_ones() {
        g[p.y + 1][p.x + 1] = 1;
    }
    loop {
        let mut changed = false;
        for step in 0..2 {
            let mut marked = Vec::new();
            for y in 1..=h {
                for x in 1..=w {
                    if g[y][x] == 0 {
                        continue;
                    }
                    let p2 = g[y - 1][x];
                    let p3 = g[y - 1][x + 1];
                    let p4 = g[y][x + 1];
                    let p5 = g[y + 1][x + 1];
                    let p6 = g[y + 1][x];
                    let p7 = g[y + 1][x - 1];
                    let p8 = g[y][x - 1];
                    let p9 = g[y - 1][x - 1];
                    let seq = [p2, p3, p4, p5, p6, p7, p8, p9, p2];
                    let b: u8 = seq[..8].iter().sum();
                    let a = seq.windows(2).filter(|s| s[0] == 0 && s[1] == 1).count();
                    let (c, d) = if step == 0 {
                        (p2 * p4 * p6, p4 * p6 * p8)
                    } else {
                        (p2 * p4 * p8, p2 * p6 * p8)
                    };
                    if (2..=6).contains(&b) && a == 1 && c == 0 && d == 0 {
                        marked.push((x, y));
                    }
                }
            }
            for &(x, y) in &marked {
                g[y][x] = 0;
            }
            changed |= !marked.is_empty();
        }
        if !changed {
            break;
        }
    }
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if g[y + 1][x + 1] == 1 {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Twenty simple shapes: rectangles, L/T/plus shapes, rings and bars.
pub fn shape_corpus() -> Vec<(String, BinaryMask)> {
    let mut out = Vec::new();
    for (w, h) in [(9, 3), (12, 5), (20, 7), (6, 15), (15, 15)] {
        let mut m = BinaryMask::new(w + 4, h + 4);
        rect(&mut m, 2, 2, w, h);
        out.push((format!("rect {w}x{h}"), m));
    }
    for t in [1, 3, 5] {
        let mut m = BinaryMask::new(30, 30);
        rect(&mut m, 3, 3, t, 22);
        rect(&mut m, 3, 25 - t, 22, t);
        out.push((format!("L thickness {t}"), m));
    }
    for t in [1, 3, 4] {
        let mut m = BinaryMask::new(30, 30);
        rect(&mut m, 3, 3, 24, t);
        rect(&mut m, 15 - t / 2, 3, t, 24);
        out.push((format!("T thickness {t}"), m));
    }
    for t in [1, 3, 5] {
        let mut m = BinaryMask::new(31, 31);
        rect(&mut m, 15 - t / 2, 3, t, 25);
        rect(&mut m, 3, 15 - t / 2, 25, t);
        out.push((format!("plus thickness {t}"), m));
    }
    for (size, t) in [(16, 1), (20, 3), (24, 4)] {
        let mut m = BinaryMask::new(size + 6, size + 6);
        rect(&mut m, 3, 3, size, size);
        let mut hole = BinaryMask::new(size + 6, size + 6);
        rect(&mut hole, 3 + t, 3 + t, size - 2 * t, size - 2 * t);
        for p in hole.iter_ones() {
            m.set(p.x, p.y, false);
        }
        out.push((format!("ring {size} thickness {t}"), m));
    }
    {
        let mut m = BinaryMask::new(40, 40);
        for i in 0..30 {
            rect(&mut m, 4 + i, 4 + i, 3, 3);
        }
        out.push(("diagonal bar".into(), m));
    }
    {
        let mut m = BinaryMask::new(40, 20);
        for x in 2..38 {
            let y = 9 + ((x as f64) * 0.4).sin().mul_add(5.0, 0.0).round() as isize;
            rect(&mut m, x, (y - 1) as usize, 1, 3);
        }
        out.push(("wavy bar".into(), m));
    }
    {
        let mut m = BinaryMask::new(36, 36);
        rect(&mut m, 3, 3, 30, 4);
        rect(&mut m, 3, 3, 4, 30);
        rect(&mut m, 29, 3, 4, 30);
        out.push(("U shape".into(), m));
    }
    assert_eq!(out.len(), 20);
    out
}

pub fn min_dist2(p: PixelCoord, pixels: &[PixelCoord]) -> Option<u64> {
    pixels.iter().map(|q| p.dist2(*q)).min()
}

/// Path length recomputed from scratch.
pub fn oracle_length(kind: SegmentKind, pixels: &[PixelCoord]) -> f64 {
    let step = |a: &PixelCoord, b: &PixelCoord| {
        let diagonal = a.x.abs_diff(b.x) == 1 && a.y.abs_diff(b.y) == 1;
        if diagonal {
            2f64.sqrt()
        } else {
            1.0
        }
    };
    let raw = match kind {
        SegmentKind::IsolatedPixel => 1.0,
        SegmentKind::JunctionCluster => return (pixels.len() as f64 - 1.0).max(1.0),
        SegmentKind::OpenPath => pixels
            .windows(2)
            .fold(0.0, |acc, w| acc + step(&w[0], &w[1])),
        SegmentKind::Loop => {
            let open = pixels
                .windows(2)
                .fold(0.0, |acc, w| acc + step(&w[0], &w[1]));
            open + step(pixels.last().unwrap(), &pixels[0])
        }
    };
    f64::max(raw, 1.0)
}

/// One row of the naive matcher.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveRow {
    pub candidates: Vec<usize>,
    pub covered: usize,
    pub ratio: f64,
    pub matched: bool,
}

/// Candidate and buffer tests by direct minimum-distance search, no dilation.
pub fn naive_match(
    subject: &SegmentDecomposition,
    reference: &SegmentDecomposition,
    cfg: &MatchConfig,
) -> Vec<NaiveRow> {
    let r2 = (cfg.buffer_radius * cfg.buffer_radius) as u64;
    subject
        .segments
        .iter()
        .map(|s| {
            let candidates: Vec<usize> = reference
                .segments
                .iter()
                .filter(|t| {
                    s.pixels
                        .iter()
                        .any(|p| min_dist2(*p, &t.pixels).is_some_and(|d| d <= r2))
                })
                .map(|t| t.id)
                .collect();
            let union: Vec<PixelCoord> = candidates
                .iter()
                .flat_map(|&id| reference.segments[id].pixels.iter().copied())
                .collect();
            let covered = s
                .pixels
                .iter()
                .filter(|p| min_dist2(**p, &union).is_some_and(|d| d <= r2))
                .count();
            let ratio = covered as f64 / s.pixels.len() as f64;
            NaiveRow {
                matched: !candidates.is_empty() && ratio >= cfg.overlap_threshold,
                candidates,
                covered,
                ratio,
            }
        })
        .collect()
}

pub fn table_equals_naive(table: &MatchTable, naive: &[NaiveRow]) -> bool {
    table.rows.len() == naive.len()
        && table.rows.iter().zip(naive).all(|(row, n)| {
            row.candidate_ids == n.candidates
                && row.covered_pixels == n.covered
                && row.overlap_ratio.to_bits() == n.ratio.to_bits()
                && row.matched == n.matched
        })
}

/// Scores from naive tables, with lengths recomputed and the empty-side conventions applied.
pub fn naive_scores(
    gt: &SegmentDecomposition,
    pred: &SegmentDecomposition,
    cfg: &MatchConfig,
) -> Scores {
    let side = |subject: &SegmentDecomposition, reference: &SegmentDecomposition| {
        let rows = naive_match(subject, reference, cfg);
        let mut matched = 0.0;
        let mut total = 0.0;
        for (seg, row) in subject.segments.iter().zip(&rows) {
            let len = oracle_length(seg.kind, &seg.pixels);
            total += len;
            if row.matched {
                matched += len;
            }
        }
        (matched, total)
    };
    let (pm, pt) = side(pred, gt);
    let (gm, gt_total) = side(gt, pred);
    let flag = match (gt.segments.is_empty(), pred.segments.is_empty()) {
        (true, true) => DegenerateFlag::BothEmpty,
        (false, true) => DegenerateFlag::PredEmpty,
        (true, false) => DegenerateFlag::GtEmpty,
        (false, false) => DegenerateFlag::None,
    };
    let (pcs, rcs, cts) = match flag {
        DegenerateFlag::BothEmpty => (1.0, 1.0, 1.0),
        DegenerateFlag::PredEmpty | DegenerateFlag::GtEmpty => (0.0, 0.0, 0.0),
        DegenerateFlag::None => {
            let p = pm / pt;
            let r = gm / gt_total;
            let c = if p + r == 0.0 {
                0.0
            } else {
                2.0 * p * r / (p + r)
            };
            (p, r, c)
        }
    };
    Scores {
        pcs,
        rcs,
        cts,
        pred_total_len: pt,
        pred_matched_len: pm,
        gt_total_len: gt_total,
        gt_matched_len: gm,
        degenerate_flag: flag,
    }
}

pub fn scores_bit_equal(a: &Scores, b: &Scores) -> bool {
    let bits = |s: &Scores| {
        [
            s.pcs,
            s.rcs,
            s.cts,
            s.pred_total_len,
            s.pred_matched_len,
            s.gt_total_len,
            s.gt_matched_len,
        ]
        .map(f64::to_bits)
    };
    bits(a) == bits(b) && a.degenerate_flag == b.degenerate_flag
}
