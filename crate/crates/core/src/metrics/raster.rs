use std::fmt::Write as _;

use rayon::prelude::*;

use super::view::{View, ViewpointSet};
use crate::model::{Aabb, Brick};

/// Fixed gain applied to the excess boundary ratio.
pub const DISTINCTNESS_GAIN: f64 = 0.25;

const INSIDE_EPS: f64 = 1e-9;

/// Binary occupancy of a prefix's projected silhouette.
///
/// The lattice is anchored at the projection of the prefix's 3D AABB centre:
/// cell `(i, j)` covers `[i, i+1) x [j, j+1)` in units of `1 / resolution`
/// LDU relative to that point and is occupied when its centre falls inside
/// some projected box. `origin` and the dimensions enclose exactly the
/// occupied cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SilhouetteRaster {
    pub origin: (i64, i64),
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub view: View,
    cells: Vec<bool>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise convex hull (monotone chain).
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn inside(hull: &[(f64, f64)], p: (f64, f64)) -> bool {
    let n = hull.len();
    n >= 3 && (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= -INSIDE_EPS)
}

fn prefix_box(prefix: &[Brick]) -> Option<Aabb> {
    let first = prefix.first()?;
    Some(prefix.iter().skip(1).fold(first.aabb, |acc, b| acc.union(&b.aabb)))
}

/// Projected outline of one box relative to `center` (CCW hull).
pub fn project_box(aabb: &Aabb, center: [f64; 3], view: &View) -> Vec<(f64, f64)> {
    let pts = aabb
        .corners()
        .iter()
        .map(|c| view.project([c[0] as f64 - center[0], c[1] as f64 - center[1], c[2] as f64 - center[2]]))
        .collect();
    convex_hull(pts)
}

impl SilhouetteRaster {
    pub fn rasterize(prefix: &[Brick], view: &View, resolution: f64) -> SilhouetteRaster {
        assert!(resolution > 0.0, "resolution must be positive");
        let empty = SilhouetteRaster {
            origin: (0, 0),
            width: 0,
            height: 0,
            resolution,
            view: *view,
            cells: Vec::new(),
        };
        let Some(bounds) = prefix_box(prefix) else {
            return empty;
        };
        let center = bounds.center();
        let hulls: Vec<Vec<(f64, f64)>> = prefix
            .iter()
            .map(|b| project_box(&b.aabb, center, view))
            .filter(|h| h.len() >= 3)
            .collect();
        // Cell i has centre (i + 0.5) / resolution.
        let span = |lo: f64, hi: f64| -> (i64, i64) {
            (
                (lo * resolution - 0.5 - 1e-9).ceil() as i64,
                (hi * resolution - 0.5 + 1e-9).floor() as i64,
            )
        };
        let mut ranges = Vec::with_capacity(hulls.len());
        let (mut gi0, mut gj0, mut gi1, mut gj1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        for h in &hulls {
            let (umin, umax) = h.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
            let (vmin, vmax) = h.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
            let (i0, i1) = span(umin, umax);
            let (j0, j1) = span(vmin, vmax);
            ranges.push((i0, i1, j0, j1));
            if i0 <= i1 && j0 <= j1 {
                gi0 = gi0.min(i0);
                gi1 = gi1.max(i1);
                gj0 = gj0.min(j0);
                gj1 = gj1.max(j1);
            }
        }
        if gi0 > gi1 {
            return empty;
        }
        let (w, h) = ((gi1 - gi0 + 1) as usize, (gj1 - gj0 + 1) as usize);
        let mut cells = vec![false; w * h];
        for (hull, &(i0, i1, j0, j1)) in hulls.iter().zip(&ranges) {
            for j in j0..=j1 {
                let v = (j as f64 + 0.5) / resolution;
                for i in i0..=i1 {
                    let idx = (j - gj0) as usize * w + (i - gi0) as usize;
                    if !cells[idx] && inside(hull, ((i as f64 + 0.5) / resolution, v)) {
                        cells[idx] = true;
                    }
                }
            }
        }
        SilhouetteRaster {
            origin: (gi0, gj0),
            width: w,
            height: h,
            resolution,
            view: *view,
            cells,
        }
        .tightened()
    }

    fn tightened(self) -> SilhouetteRaster {
        let (w, h) = (self.width, self.height);
        let (mut i0, mut j0, mut i1, mut j1) = (usize::MAX, usize::MAX, 0usize, 0usize);
        for j in 0..h {
            for i in 0..w {
                if self.cells[j * w + i] {
                    i0 = i0.min(i);
                    i1 = i1.max(i);
                    j0 = j0.min(j);
                    j1 = j1.max(j);
                }
            }
        }
        if i0 == usize::MAX {
            return SilhouetteRaster {
                origin: (0, 0),
                width: 0,
                height: 0,
                cells: Vec::new(),
                ..self
            };
        }
        let (nw, nh) = (i1 - i0 + 1, j1 - j0 + 1);
        let mut cells = Vec::with_capacity(nw * nh);
        for j in j0..=j1 {
            cells.extend_from_slice(&self.cells[j * w + i0..=j * w + i1]);
        }
        SilhouetteRaster {
            origin: (self.origin.0 + i0 as i64, self.origin.1 + j0 as i64),
            width: nw,
            height: nh,
            cells,
            ..self
        }
    }

    /// Occupancy at absolute lattice coordinates.
    pub fn get(&self, i: i64, j: i64) -> bool {
        let (di, dj) = (i - self.origin.0, j - self.origin.1);
        if di < 0 || dj < 0 || di >= self.width as i64 || dj >= self.height as i64 {
            return false;
        }
        self.cells[dj as usize * self.width + di as usize]
    }

    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0
    }

    /// Cells of the bounding rectangle lying on either side of the silhouette
    /// outline: occupied cells with an empty (or outside) 4-neighbour, plus
    /// empty cells with an occupied 4-neighbour.
    pub fn boundary_cells(&self) -> usize {
        let (ox, oy) = self.origin;
        let mut count = 0;
        for dj in 0..self.height as i64 {
            for di in 0..self.width as i64 {
                let (i, j) = (ox + di, oy + dj);
                let here = self.get(i, j);
                let differs = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|(a, b)| self.get(i + a, j + b) != here);
                if differs {
                    count += 1;
                }
            }
        }
        count
    }

    /// Boundary cells of the filled bounding rectangle.
    pub fn rectangle_boundary_cells(&self) -> usize {
        let (w, h) = (self.width, self.height);
        if w == 0 || h == 0 {
            0
        } else if w <= 2 || h <= 2 {
            w * h
        } else {
            2 * (w + h) - 4
        }
    }

    /// Plain-text PGM (P2), top row first; occupied cells are black.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n1\n", self.width, self.height);
        for dj in (0..self.height).rev() {
            let row: Vec<&str> = (0..self.width)
                .map(|di| if self.cells[dj * self.width + di] { "0" } else { "1" })
                .collect();
            writeln!(out, "{}", row.join(" ")).expect("writing to a String");
        }
        out
    }
}

/// Distinctness of one silhouette: excess boundary over its bounding rectangle.
pub fn view_distinctness(raster: &SilhouetteRaster) -> f64 {
    let rect = raster.rectangle_boundary_cells();
    if rect == 0 {
        return 0.0;
    }
    let ratio = raster.boundary_cells() as f64 / rect as f64;
    (DISTINCTNESS_GAIN * (ratio - 1.0)).clamp(0.0, 1.0)
}

/// Mean per-view distinctness; 0 for a plain rectangle from every view.
pub fn distinctness_score(prefix: &[Brick], views: &ViewpointSet, resolution: f64) -> f64 {
    let scores: Vec<f64> = views
        .views()
        .par_iter()
        .map(|v| view_distinctness(&SilhouetteRaster::rasterize(prefix, v, resolution)))
        .collect();
    scores.iter().sum::<f64>() / scores.len() as f64
}

/// Intersection over union of two rasters on the shared lattice.
pub fn raster_iou(a: &SilhouetteRaster, b: &SilhouetteRaster) -> f64 {
    let (inter, union) = if a.is_empty() && b.is_empty() {
        return 1.0;
    } else {
        let i0 = a.origin.0.min(b.origin.0);
        let j0 = a.origin.1.min(b.origin.1);
        let i1 = (a.origin.0 + a.width as i64).max(b.origin.0 + b.width as i64);
        let j1 = (a.origin.1 + a.height as i64).max(b.origin.1 + b.height as i64);
        let (mut inter, mut union) = (0usize, 0usize);
        for j in j0..j1 {
            for i in i0..i1 {
                let (x, y) = (a.get(i, j), b.get(i, j));
                inter += (x && y) as usize;
                union += (x || y) as usize;
            }
        }
        (inter, union)
    };
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Mean silhouette IoU over views; 1.0 means indistinguishable.
pub fn confusability(a: &[Brick], b: &[Brick], views: &ViewpointSet, resolution: f64) -> f64 {
    let scores: Vec<f64> = views
        .views()
        .par_iter()
        .map(|v| {
            raster_iou(
                &SilhouetteRaster::rasterize(a, v, resolution),
                &SilhouetteRaster::rasterize(b, v, resolution),
            )
        })
        .collect();
    scores.iter().sum::<f64>() / scores.len() as f64
}
