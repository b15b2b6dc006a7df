//! Connected-component labeling and border flood fill.

use std::collections::VecDeque;

use crate::mask::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Connectivity {
    Four,
    Eight,
}

const N4: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
const N8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

impl Connectivity {
    pub fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &N4,
            Connectivity::Eight => &N8,
        }
    }
}

/// Summary of one labeled component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub label: u32,
    pub pixel_count: usize,
    /// Raster index of the first pixel encountered in scan order.
    pub first_index: usize,
    pub touches_border: bool,
}

/// Per-pixel labels (0 = background, 1..=K components) plus the component list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub components: Vec<Component>,
}

impl Labeling {
    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Pixel indices of each component, indexed by `label - 1`, in raster order.
    pub fn pixel_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.components.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            if l != 0 {
                out[l as usize - 1].push(i);
            }
        }
        out
    }
}

/// Labels foreground components; labels follow the raster order of each component's first pixel.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Labeling {
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    let pixels = mask.pixels();

    for start in 0..w * h {
        if pixels[start] == 0 || labels[start] != 0 {
            continue;
        }
        let label = components.len() as u32 + 1;
        labels[start] = label;
        queue.push_back(start);
        let mut count = 0;
        let mut touches_border = false;
        while let Some(i) = queue.pop_front() {
            count += 1;
            let (x, y) = (i % w, i / w);
            touches_border |= x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if pixels[j] != 0 && labels[j] == 0 {
                    labels[j] = label;
                    queue.push_back(j);
                }
            }
        }
        components.push(Component {
            label,
            pixel_count: count,
            first_index: start,
            touches_border,
        });
    }

    Labeling {
        width: w,
        height: h,
        labels,
        components,
    }
}

/// Marks the background pixels 4-connected to a background pixel on the image border.
pub fn border_reachable_background(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut out = BinaryMask::new(w, h);
    if w == 0 || h == 0 {
        return out;
    }
    let mut queue = VecDeque::new();
    let seed = |x: usize, y: usize, out: &mut BinaryMask, queue: &mut VecDeque<(usize, usize)>| {
        if !mask.get(x, y) && !out.get(x, y) {
            out.set(x, y, true);
            queue.push_back((x, y));
        }
    };
    for x in 0..w {
        seed(x, 0, &mut out, &mut queue);
        seed(x, h - 1, &mut out, &mut queue);
    }
    for y in 0..h {
        seed(0, y, &mut out, &mut queue);
        seed(w - 1, y, &mut out, &mut queue);
    }
    while let Some((x, y)) = queue.pop_front() {
        for &(dx, dy) in &N4 {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                continue;
            }
            seed(nx as usize, ny as usize, &mut out, &mut queue);
        }
    }
    out
}
