//! Spatio-color granulation.
//!
//! A granule is grown from a seed pixel by 4-connected flood fill over the
//! still-unassigned pixels whose RGB color stays within `thr` of the SEED
//! (maximum absolute per-channel difference, strict `<`). Seeds are taken in
//! raster order, so the partition is a pure function of the frame and `thr`.
//! Color similarity is not transitive, which is why the result depends on the
//! seeding order rather than being an equivalence-class partition.

use std::collections::VecDeque;

use crate::colorspace::rgb_to_ycrcb;
use crate::frame::{FrameBuffer, Rgb};

pub const DEFAULT_THR: u8 = 30;

/// Mean (R, G, B, Y, Cr, Cb) of a pixel set, each channel scaled to `[0, 1]`.
pub type Feature = [f64; 6];

/// Axis-aligned pixel box, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BBox {
    fn point(x: usize, y: usize) -> Self {
        Self {
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
        }
    }

    fn extend(&mut self, x: usize, y: usize) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Granule {
    pub id: usize,
    /// Row-major pixel indices in flood-fill visit order.
    pub pixel_indices: Vec<usize>,
    pub seed_index: usize,
    pub mean_feature: Feature,
    pub bbox: BBox,
}

impl Granule {
    pub fn len(&self) -> usize {
        self.pixel_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixel_indices.is_empty()
    }
}

/// A frame partitioned into granules, with the granule adjacency graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GranulatedFrame {
    pub width: usize,
    pub height: usize,
    pub granules: Vec<Granule>,
    /// Granule id for every pixel, row-major.
    pub pixel_to_granule: Vec<usize>,
    /// Sorted neighbor lists; `adjacency[a]` contains `b` iff the granules touch.
    pub adjacency: Vec<Vec<usize>>,
}

impl GranulatedFrame {
    pub fn len(&self) -> usize {
        self.granules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.granules.is_empty()
    }

    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adjacency[id]
    }

    /// Undirected edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }
}

/// Scales an RGB pixel and its YCrCb conversion to the unit cube.
pub fn pixel_feature(p: Rgb) -> Feature {
    let q = rgb_to_ycrcb(p);
    [p[0], p[1], p[2], q.y, q.cr, q.cb].map(|c| f64::from(c) / 255.0)
}

fn within(a: Rgb, b: Rgb, thr: u8) -> bool {
    a.iter().zip(&b).all(|(&x, &y)| x.abs_diff(y) < thr)
}

/// Partitions `frame` into spatio-color granules. `thr` of 0 is treated as 1.
pub fn granulate(frame: &FrameBuffer, thr: u8) -> GranulatedFrame {
    let thr = thr.max(1);
    let (w, h) = (frame.width(), frame.height());
    let pixels = frame.pixels();
    let mut owner = vec![usize::MAX; pixels.len()];
    let mut granules = Vec::new();
    let mut queue = VecDeque::new();

    for seed in 0..pixels.len() {
        if owner[seed] != usize::MAX {
            continue;
        }
        let id = granules.len();
        let seed_color = pixels[seed];
        let mut members = Vec::new();
        let mut bbox = BBox::point(seed % w, seed / w);
        owner[seed] = id;
        queue.push_back(seed);

        while let Some(i) = queue.pop_front() {
            members.push(i);
            let (x, y) = (i % w, i / w);
            bbox.extend(x, y);
            let mut visit = |j: usize| {
                if owner[j] == usize::MAX && within(pixels[j], seed_color, thr) {
                    owner[j] = id;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }

        let mut sum = [0.0; 6];
        for &i in &members {
            for (s, v) in sum.iter_mut().zip(pixel_feature(pixels[i])) {
                *s += v;
            }
        }
        let n = members.len() as f64;
        granules.push(Granule {
            id,
            pixel_indices: members,
            seed_index: seed,
            mean_feature: sum.map(|s| (s / n).clamp(0.0, 1.0)),
            bbox,
        });
    }

    let mut gf = GranulatedFrame {
        width: w,
        height: h,
        granules,
        pixel_to_granule: owner,
        adjacency: Vec::new(),
    };
    gf.adjacency = build_adjacency(&gf);
    gf
}

/// Granule adjacency from 4-adjacent pixel pairs that straddle two granules.
pub fn build_adjacency(gf: &GranulatedFrame) -> Vec<Vec<usize>> {
    let (w, h) = (gf.width, gf.height);
    let owner = &gf.pixel_to_granule;
    let mut adj = vec![Vec::new(); gf.granules.len()];
    let mut link = |a: usize, b: usize| {
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                link(owner[i], owner[i + 1]);
            }
            if y + 1 < h {
                link(owner[i], owner[i + w]);
            }
        }
    }
    for ns in &mut adj {
        ns.sort_unstable();
        ns.dedup();
    }
    adj
}
