use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::grid::{solve, Domain, Raster, RasterChart};
use super::{ModulusError, SANDWICH_TOL};

/// Inner vertices may lie this far outside the outer loop before the region
/// is rejected outright; closer contact is reported by the grid check.
const CONTAINMENT_TOL: f64 = 1e-12;

/// A closed boundary curve in the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    Circle { center: Complex64, radius: f64 },
    /// Closed polygon; the last vertex connects back to the first.
    Polyline(Vec<Complex64>),
}

impl Boundary {
    /// Strict interior test (crossing number for polygons).
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Boundary::Circle { center, radius } => (z - center).norm() < *radius,
            Boundary::Polyline(pts) => {
                let mut inside = false;
                for i in 0..pts.len() {
                    if crosses(pts[i], pts[(i + 1) % pts.len()], z) {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Boundary::Circle { radius, .. } => PI * radius * radius,
            Boundary::Polyline(pts) => shoelace(pts).abs(),
        }
    }

    /// Perimeter of the convex hull: a lower bound for the length of any
    /// closed curve surrounding the boundary.
    pub fn hull_perimeter(&self) -> f64 {
        match self {
            Boundary::Circle { radius, .. } => 2.0 * PI * radius,
            Boundary::Polyline(pts) => {
                let hull = convex_hull(pts);
                (0..hull.len()).map(|i| (hull[(i + 1) % hull.len()] - hull[i]).norm()).sum()
            }
        }
    }

    /// Area centroid (circle center, or polygon centroid).
    pub fn centroid(&self) -> Complex64 {
        match self {
            Boundary::Circle { center, .. } => *center,
            Boundary::Polyline(pts) => {
                let a = shoelace(pts);
                if a.abs() < 1e-300 {
                    return pts.iter().sum::<Complex64>() / pts.len() as f64;
                }
                let mut c = Complex64::new(0.0, 0.0);
                for i in 0..pts.len() {
                    let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
                    let cross = p.re * q.im - q.re * p.im;
                    c += (p + q) * cross;
                }
                c / (6.0 * a)
            }
        }
    }

    /// Distance from `z` to the curve.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match self {
            Boundary::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            Boundary::Polyline(pts) => (0..pts.len())
                .map(|i| point_segment(pts[i], pts[(i + 1) % pts.len()], z).0)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest distance from `z` to a point of the curve.
    pub fn max_distance_from(&self, z: Complex64) -> f64 {
        match self {
            Boundary::Circle { center, radius } => (z - center).norm() + radius,
            Boundary::Polyline(pts) => pts.iter().map(|p| (p - z).norm()).fold(0.0, f64::max),
        }
    }

    /// Image under `z ↦ a z + b`.
    pub fn affine_image(&self, a: Complex64, b: Complex64) -> Boundary {
        match self {
            Boundary::Circle { center, radius } => Boundary::Circle { center: a * center + b, radius: a.norm() * radius },
            Boundary::Polyline(pts) => Boundary::Polyline(pts.iter().map(|p| a * p + b).collect()),
        }
    }

    /// `n` points evenly spaced in angle (circle) or the vertices (polygon).
    pub fn points(&self, n: usize) -> Vec<Complex64> {
        match self {
            Boundary::Circle { center, radius } => (0..n)
                .map(|k| center + Complex64::from_polar(*radius, 2.0 * PI * k as f64 / n as f64))
                .collect(),
            Boundary::Polyline(pts) => pts.clone(),
        }
    }
}

fn crosses(a: Complex64, b: Complex64, z: Complex64) -> bool {
    if (a.im > z.im) != (b.im > z.im) {
        let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
        z.re < x
    } else {
        false
    }
}

fn shoelace(pts: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for i in 0..pts.len() {
        let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
        s += p.re * q.im - q.re * p.im;
    }
    0.5 * s
}

pub(crate) fn convex_hull(pts: &[Complex64]) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = pts.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

/// Distance from `z` to the segment `[a, b]` and the closest point.
pub(crate) fn point_segment(a: Complex64, b: Complex64, z: Complex64) -> (f64, Complex64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 > 0.0 { (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0) } else { 0.0 };
    let p = a + d * t;
    ((z - p).norm(), p)
}

fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let orient = |p: Complex64, q: Complex64, r: Complex64| ((q - p).re * (r - p).im - (q - p).im * (r - p).re).signum();
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Segment-segment distance, with the closest point on `[a, b]`.
fn segment_segment(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (f64, Complex64) {
    if segments_intersect(a, b, c, d) {
        return (0.0, a);
    }
    let mut best = point_segment(a, b, c);
    let cand = point_segment(a, b, d);
    if cand.0 < best.0 {
        best = cand;
    }
    for p in [a, b] {
        let (dist, _) = point_segment(c, d, p);
        if dist < best.0 {
            best = (dist, p);
        }
    }
    best
}

/// Euclidean distance between the inner curve and the outer curve of a
/// nested pair, with the closest point on the inner curve.
pub(crate) fn boundary_gap(inner: &Boundary, outer: &Boundary) -> (f64, Complex64) {
    match (inner, outer) {
        (Boundary::Circle { center: c1, radius: r1 }, Boundary::Circle { center: c2, radius: r2 }) => {
            let off = c1 - c2;
            let dir = if off.norm() > 0.0 { off / off.norm() } else { Complex64::new(1.0, 0.0) };
            (r2 - off.norm() - r1, c1 + dir * r1)
        }
        (Boundary::Circle { center, radius }, Boundary::Polyline(pts)) => {
            let mut best = (f64::INFINITY, *center);
            for i in 0..pts.len() {
                let (d, p) = point_segment(pts[i], pts[(i + 1) % pts.len()], *center);
                if d < best.0 {
                    best = (d, p);
                }
            }
            let dir = (best.1 - center) / (best.1 - center).norm();
            (best.0 - radius, center + dir * radius)
        }
        (Boundary::Polyline(pts), Boundary::Circle { center, radius }) => {
            let mut best = (f64::INFINITY, pts[0]);
            for p in pts {
                let d = radius - (p - center).norm();
                if d < best.0 {
                    best = (d, *p);
                }
            }
            best
        }
        (Boundary::Polyline(a), Boundary::Polyline(b)) => {
            let mut best = (f64::INFINITY, a[0]);
            for i in 0..a.len() {
                let (p, q) = (a[i], a[(i + 1) % a.len()]);
                for j in 0..b.len() {
                    let cand = segment_segment(p, q, b[j], b[(j + 1) % b.len()]);
                    if cand.0 < best.0 {
                        best = cand;
                    }
                }
            }
            best
        }
    }
}

/// Point-in-polygon test with edges bucketed into horizontal bands.
pub(crate) struct PolygonIndex {
    pts: Vec<Complex64>,
    y0: f64,
    dy: f64,
    bands: Vec<Vec<usize>>,
}

impl PolygonIndex {
    pub(crate) fn new(pts: &[Complex64]) -> Self {
        let y0 = pts.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
        let y1 = pts.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max);
        let nb = pts.len().max(1);
        let dy = ((y1 - y0) / nb as f64).max(f64::MIN_POSITIVE);
        let mut bands = vec![Vec::new(); nb];
        let band = |y: f64| (((y - y0) / dy) as usize).min(nb - 1);
        for i in 0..pts.len() {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            for band_edges in &mut bands[band(a.im.min(b.im))..=band(a.im.max(b.im))] {
                band_edges.push(i);
            }
        }
        PolygonIndex { pts: pts.to_vec(), y0, dy, bands }
    }

    pub(crate) fn contains(&self, z: Complex64) -> bool {
        let t = (z.im - self.y0) / self.dy;
        if !(t >= 0.0 && t <= self.bands.len() as f64) {
            return false;
        }
        let b = (t as usize).min(self.bands.len() - 1);
        let n = self.pts.len();
        let mut inside = false;
        for &i in &self.bands[b] {
            if crosses(self.pts[i], self.pts[(i + 1) % n], z) {
                inside = !inside;
            }
        }
        inside
    }
}

enum Locator {
    Circle { center: Complex64, radius: f64 },
    Polygon(PolygonIndex),
}

impl Locator {
    fn new(b: &Boundary) -> Self {
        match b {
            Boundary::Circle { center, radius } => Locator::Circle { center: *center, radius: *radius },
            Boundary::Polyline(pts) => Locator::Polygon(PolygonIndex::new(pts)),
        }
    }

    fn contains(&self, z: Complex64) -> bool {
        match self {
            Locator::Circle { center, radius } => (z - center).norm() < *radius,
            Locator::Polygon(p) => p.contains(z),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AnnulusKind {
    Round { center: Complex64, r_in: f64, r_out: f64 },
    /// Complement of the closed disks `D(0, r1)` and `D(1, r2)` on the sphere.
    TwoDisks { r1: f64, r2: f64 },
    Sampled { inner: Vec<Complex64>, outer: Vec<Complex64> },
}

/// A doubly connected plane region between an inner and an outer curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRegion {
    pub kind: AnnulusKind,
}

impl AnnulusRegion {
    pub fn round(center: Complex64, r_in: f64, r_out: f64) -> Result<Self, ModulusError> {
        if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
            return Err(ModulusError::BadRadii(r_in, r_out));
        }
        Ok(AnnulusRegion { kind: AnnulusKind::Round { center, r_in, r_out } })
    }

    pub fn two_disks(r1: f64, r2: f64) -> Result<Self, ModulusError> {
        if !(r1 > 0.0 && r2 > 0.0) {
            return Err(ModulusError::BadRadii(r1, r2));
        }
        if r1 + r2 >= 1.0 {
            return Err(ModulusError::DisksTouch((1.0 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)));
        }
        Ok(AnnulusRegion { kind: AnnulusKind::TwoDisks { r1, r2 } })
    }

    pub fn sampled(inner: Vec<Complex64>, outer: Vec<Complex64>) -> Result<Self, ModulusError> {
        if inner.len() < 3 || outer.len() < 3 {
            return Err(ModulusError::BadRegion("each boundary loop needs at least 3 points".into()));
        }
        if inner.iter().chain(&outer).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(ModulusError::BadRegion("non-finite boundary point".into()));
        }
        let out = Boundary::Polyline(outer.clone());
        for z in &inner {
            if !out.contains(*z) && out.distance_to(*z) > CONTAINMENT_TOL {
                return Err(ModulusError::BadRegion(format!("inner point {z} lies outside the outer loop")));
            }
        }
        Ok(AnnulusRegion { kind: AnnulusKind::Sampled { inner, outer } })
    }

    /// Inner and outer curves of a plane model. Two-disk regions are moved by
    /// `w = 1/z`, which sends `D(0, r1)` to the exterior of `|w| = 1/r1`.
    pub fn boundaries(&self) -> (Boundary, Boundary) {
        match &self.kind {
            AnnulusKind::Round { center, r_in, r_out } => (
                Boundary::Circle { center: *center, radius: *r_in },
                Boundary::Circle { center: *center, radius: *r_out },
            ),
            AnnulusKind::TwoDisks { r1, r2 } => {
                let s = 1.0 - r2 * r2;
                (
                    Boundary::Circle { center: Complex64::new(1.0 / s, 0.0), radius: r2 / s },
                    Boundary::Circle { center: Complex64::new(0.0, 0.0), radius: 1.0 / r1 },
                )
            }
            AnnulusKind::Sampled { inner, outer } => (Boundary::Polyline(inner.clone()), Boundary::Polyline(outer.clone())),
        }
    }

    /// Default centre for the log-polar raster: a point inside the inner curve.
    pub fn default_center(&self) -> Result<Complex64, ModulusError> {
        let (inner, _) = self.boundaries();
        let c = inner.centroid();
        if inner.contains(c) {
            return Ok(c);
        }
        let pts = inner.points(3);
        let avg = pts.iter().sum::<Complex64>() / pts.len() as f64;
        if inner.contains(avg) {
            Ok(avg)
        } else {
            Err(ModulusError::BadCenter)
        }
    }

    /// Image under `z ↦ a z + b` (round and sampled regions).
    pub fn affine_image(&self, a: Complex64, b: Complex64) -> Result<Self, ModulusError> {
        match &self.kind {
            AnnulusKind::Round { center, r_in, r_out } => {
                AnnulusRegion::round(a * center + b, a.norm() * r_in, a.norm() * r_out)
            }
            AnnulusKind::Sampled { inner, outer } => AnnulusRegion::sampled(
                inner.iter().map(|z| a * z + b).collect(),
                outer.iter().map(|z| a * z + b).collect(),
            ),
            AnnulusKind::TwoDisks { .. } => {
                Err(ModulusError::BadRegion("two-disk regions are normalized; map their sampled boundary instead".into()))
            }
        }
    }

    /// Flat-metric bounds `(Height²/Area, Area/Width²)` with Height the gap
    /// between the curves, Width the hull perimeter of the inner curve.
    pub fn flat_bounds(&self) -> (f64, f64) {
        let (inner, outer) = self.boundaries();
        let height = boundary_gap(&inner, &outer).0.max(0.0);
        let area = outer.area() - inner.area();
        let width = inner.hull_perimeter();
        (height * height / area, area / (width * width))
    }
}

/// Log-polar raster about `center` with `resolution` angular cells.
pub fn annulus_raster(region: &AnnulusRegion, center: Complex64, resolution: usize) -> Result<Raster, ModulusError> {
    let (inner, outer) = region.boundaries();
    if !inner.contains(center) {
        return Err(ModulusError::BadCenter);
    }
    if resolution < 8 {
        return Err(ModulusError::GridTooCoarse(format!("resolution {resolution} is below 8")));
    }
    let near = inner.distance_to(center);
    let far = outer.max_distance_from(center);
    Ok(Raster::log_polar(center, near.ln(), far.ln(), resolution))
}

/// Grid estimate of a modulus together with the flat-metric sandwich.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub energy: f64,
    pub height: f64,
    pub width: f64,
    pub area: f64,
    pub active_nodes: usize,
    pub iterations: usize,
    pub raster: Raster,
}

impl GridEstimate {
    pub fn sandwich_holds(&self) -> bool {
        self.lower <= self.estimate * (1.0 + SANDWICH_TOL) && self.estimate <= self.upper * (1.0 + SANDWICH_TOL)
    }
}

struct AnnulusDomain<'a> {
    raster: &'a Raster,
    inner: Locator,
    outer: Locator,
}

impl Domain for AnnulusDomain<'_> {
    fn inside(&self, p: (f64, f64)) -> bool {
        let z = self.raster.to_plane(p);
        self.outer.contains(z) && !self.inner.contains(z)
    }

    fn boundary_value(&self, _inside: (f64, f64), outside: (f64, f64), _crossing: (f64, f64)) -> Option<f64> {
        if self.inner.contains(self.raster.to_plane(outside)) {
            Some(0.0)
        } else {
            Some(1.0)
        }
    }
}

/// `grid_modulus_on` with the log-polar raster of `resolution` angular cells
/// about the region's default centre.
pub fn grid_modulus(region: &AnnulusRegion, resolution: usize) -> Result<GridEstimate, ModulusError> {
    let center = region.default_center()?;
    grid_modulus_about(region, center, resolution)
}

/// As [`grid_modulus`], centring the log-polar raster at `center`, which must
/// lie inside the inner curve.
pub fn grid_modulus_about(region: &AnnulusRegion, center: Complex64, resolution: usize) -> Result<GridEstimate, ModulusError> {
    let raster = annulus_raster(region, center, resolution)?;
    grid_modulus_on(region, &raster)
}

/// Modulus `1/E` of the discrete harmonic measure of the outer curve on a
/// caller-supplied raster, with the flat-metric bounds.
pub fn grid_modulus_on(region: &AnnulusRegion, raster: &Raster) -> Result<GridEstimate, ModulusError> {
    let (inner, outer) = region.boundaries();
    let (height, closest) = boundary_gap(&inner, &outer);
    let cell = raster.cell_size(raster.from_plane(closest));
    if !(height >= cell) {
        return Err(ModulusError::GridTooCoarse(format!(
            "boundary gap {height:e} is below the local cell size {cell:e}"
        )));
    }
    if let RasterChart::LogPolar { center } = raster.chart {
        if !inner.contains(center) {
            return Err(ModulusError::BadCenter);
        }
    }
    let domain = AnnulusDomain { raster, inner: Locator::new(&inner), outer: Locator::new(&outer) };
    let sol = solve(raster, &domain)?;
    let area = outer.area() - inner.area();
    let width = inner.hull_perimeter();
    let est = GridEstimate {
        estimate: 1.0 / sol.energy,
        lower: height * height / area,
        upper: area / (width * width),
        energy: sol.energy,
        height,
        width,
        area,
        active_nodes: sol.active_count(),
        iterations: sol.iterations,
        raster: raster.clone(),
    };
    debug_assert!(est.sandwich_holds(), "sandwich violated: {} <= {} <= {}", est.lower, est.estimate, est.upper);
    Ok(est)
}
