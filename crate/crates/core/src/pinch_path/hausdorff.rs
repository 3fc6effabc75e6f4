//! Exact symmetric Hausdorff distance between point clouds on the sphere,
//! using a uniform bucket grid over the embedded (unit-sphere) coordinates.

use crate::sphere::{chord, SpherePoint};

use super::PathError;

/// Uniform grid of buckets over the bounding box of a point set in R³.
struct BucketGrid<'a> {
    points: &'a [[f64; 3]],
    lo: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    start: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> BucketGrid<'a> {
    fn new(points: &'a [[f64; 3]]) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max).max(1e-12);
        // about two points per occupied cell for clouds near curves or surfaces
        let per_axis = ((points.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let cell = extent / per_axis as f64;
        let dims = [0, 1, 2].map(|k| (((hi[k] - lo[k]) / cell) as usize + 1).min(per_axis + 1));
        let mut counts = vec![0usize; dims[0] * dims[1] * dims[2] + 1];
        let mut grid = BucketGrid { points, lo, cell, dims, start: Vec::new(), order: Vec::new() };
        let keys: Vec<usize> = points.iter().map(|p| grid.key(grid.coords(p))).collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut order = vec![0; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            order[fill[k]] = i;
            fill[k] += 1;
        }
        grid.start = counts;
        grid.order = order;
        grid
    }

    fn coords(&self, p: &[f64; 3]) -> [isize; 3] {
        [0, 1, 2].map(|k| ((p[k] - self.lo[k]) / self.cell).floor() as isize)
    }

    fn clamp(&self, c: [isize; 3]) -> [usize; 3] {
        [0, 1, 2].map(|k| c[k].clamp(0, self.dims[k] as isize - 1) as usize)
    }

    fn key(&self, c: [isize; 3]) -> usize {
        let [i, j, k] = self.clamp(c);
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    fn bucket(&self, c: [usize; 3]) -> &[usize] {
        let key = (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2];
        &self.order[self.start[key]..self.start[key + 1]]
    }

    /// Distance from `q` to the nearest grid point, searching shells of
    /// cells outward until no unvisited cell can hold anything closer.
    fn nearest(&self, q: &[f64; 3]) -> f64 {
        let home = self.clamp(self.coords(q));
        let max_ring = self.dims.iter().copied().max().unwrap_or(1);
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            let r = ring as isize;
            let range = |k: usize| {
                let a = (home[k] as isize - r).max(0) as usize;
                let b = (home[k] as isize + r).min(self.dims[k] as isize - 1) as usize;
                a..=b
            };
            for i in range(0) {
                for j in range(1) {
                    for k in range(2) {
                        let on_shell = [i, j, k]
                            .iter()
                            .zip(home.iter())
                            .any(|(&a, &h)| (a as isize - h as isize).abs() == r);
                        if !on_shell {
                            continue;
                        }
                        for &idx in self.bucket([i, j, k]) {
                            best = best.min(chord(q, &self.points[idx]));
                        }
                    }
                }
            }
            // every point in shell ring+1 or beyond is at least this far from q
            let reach = ring as f64 * self.cell + self.gap_to_home_boundary(q, home);
            if best <= reach {
                break;
            }
        }
        best
    }

    /// Distance from `q` to the boundary of the block of cells within one ring
    /// of `home` beyond the current one, not counting the ring itself.
    fn gap_to_home_boundary(&self, q: &[f64; 3], home: [usize; 3]) -> f64 {
        (0..3)
            .map(|k| {
                let a = q[k] - (self.lo[k] + home[k] as f64 * self.cell);
                let b = self.lo[k] + (home[k] + 1) as f64 * self.cell - q[k];
                a.min(b).max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn directed(from: &[[f64; 3]], to: &BucketGrid) -> f64 {
    from.iter().map(|p| to.nearest(p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance in the chordal metric.
pub fn hausdorff(a: &[SpherePoint], b: &[SpherePoint]) -> Result<f64, PathError> {
    if a.is_empty() || b.is_empty() {
        return Err(PathError::EmptyCloud);
    }
    let ea: Vec<[f64; 3]> = a.iter().map(SpherePoint::embed).collect();
    let eb: Vec<[f64; 3]> = b.iter().map(SpherePoint::embed).collect();
    let (ga, gb) = (BucketGrid::new(&ea), BucketGrid::new(&eb));
    Ok(directed(&ea, &gb).max(directed(&eb, &ga)))
}
