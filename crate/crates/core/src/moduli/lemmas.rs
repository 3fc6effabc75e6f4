//! Quadrilateral moduli and numerical checks of the classical modulus
//! inequalities: quadrilaterals covering an annulus, three overlapping
//! quadrilaterals, and round annuli inside a thick annulus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use super::grid::{solve, Domain, Raster, RasterChart, Solution};
use super::region::{convex_hull, grid_modulus, grid_modulus_on, point_segment, AnnulusKind, AnnulusRegion, Boundary, PolygonIndex};
use super::{round_modulus, ModulusError, SANDWICH_TOL};

/// Discretization slack for the inequality checks (relative for margins,
/// absolute for the round-annulus bound).
pub const LEMMA_SLACK: f64 = 0.02;
/// Points per side when mapping quadrilateral sides through a curved chart.
const SIDE_POINTS: usize = 1024;

/// A quadrilateral given as a polygon in raster coordinates with four marked
/// corners. Side `k` runs from `corners[k]` to `corners[k+1]`; the potential
/// is 0 on side 0, 1 on side 2, and sides 1 and 3 are insulated. The
/// modulus is the extremal length of curves joining side 0 to side 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadRegion {
    pub vertices: Vec<(f64, f64)>,
    pub corners: [usize; 4],
}

impl QuadRegion {
    pub fn new(vertices: Vec<(f64, f64)>, corners: [usize; 4]) -> Result<Self, ModulusError> {
        if vertices.len() < 4 {
            return Err(ModulusError::BadRegion("a quadrilateral needs at least 4 vertices".into()));
        }
        if !corners.windows(2).all(|w| w[0] < w[1]) || corners[3] >= vertices.len() {
            return Err(ModulusError::BadRegion(format!("corners {corners:?} must be increasing vertex indices")));
        }
        Ok(QuadRegion { vertices, corners })
    }

    /// `[x0, x1] × [y0, y1]` with side 0 at the bottom.
    pub fn rectangle_horizontal(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        QuadRegion { vertices: vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)], corners: [0, 1, 2, 3] }
    }

    /// `[s0, s1] × [t0, t1]` with side 0 on `u = s0`; on a log-polar raster
    /// this is a sector of a round annulus running from inner to outer circle.
    pub fn rectangle_radial(s0: f64, s1: f64, t0: f64, t1: f64) -> Self {
        QuadRegion { vertices: vec![(s0, t1), (s0, t0), (s1, t0), (s1, t1)], corners: [0, 1, 2, 3] }
    }

    fn side_of_edge(&self, e: usize) -> usize {
        self.corners.iter().rposition(|&c| c <= e).unwrap_or(3)
    }

    fn edge(&self, e: usize) -> ((f64, f64), (f64, f64)) {
        (self.vertices[e], self.vertices[(e + 1) % self.vertices.len()])
    }

    /// Plane image of side `k`, finely subdivided.
    fn side_image(&self, raster: &Raster, k: usize) -> Vec<Complex64> {
        let n = self.vertices.len();
        let (start, end) = (self.corners[k], if k == 3 { self.corners[0] + n } else { self.corners[k + 1] });
        let per_edge = match raster.chart {
            RasterChart::Cartesian => 1,
            RasterChart::LogPolar { .. } => (SIDE_POINTS / (end - start)).max(1),
        };
        let mut out = Vec::new();
        for e in start..end {
            let (a, b) = self.edge(e % n);
            for s in 0..per_edge {
                let t = s as f64 / per_edge as f64;
                out.push(raster.to_plane((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))));
            }
        }
        let last = self.vertices[end % n];
        out.push(raster.to_plane(last));
        out
    }
}

fn to_c(p: (f64, f64)) -> Complex64 {
    Complex64::new(p.0, p.1)
}

struct QuadDomain<'a> {
    quad: &'a QuadRegion,
    index: PolygonIndex,
}

impl Domain for QuadDomain<'_> {
    fn inside(&self, p: (f64, f64)) -> bool {
        self.index.contains(to_c(p))
    }

    fn boundary_value(&self, _inside: (f64, f64), _outside: (f64, f64), crossing: (f64, f64)) -> Option<f64> {
        let x = to_c(crossing);
        let mut best = (f64::INFINITY, 0);
        for e in 0..self.quad.vertices.len() {
            let (a, b) = self.quad.edge(e);
            let d = point_segment(to_c(a), to_c(b), x).0;
            if d < best.0 {
                best = (d, e);
            }
        }
        match self.quad.side_of_edge(best.1) {
            0 => Some(0.0),
            2 => Some(1.0),
            _ => None,
        }
    }
}

/// Grid modulus of a quadrilateral with flat-metric bounds: Height is the
/// distance between the images of sides 0 and 2, Width the distance between
/// the images of sides 1 and 3.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub energy: f64,
    pub active_nodes: usize,
    pub iterations: usize,
}

impl QuadEstimate {
    pub fn sandwich_holds(&self) -> bool {
        self.lower <= self.estimate * (1.0 + SANDWICH_TOL) && self.estimate <= self.upper * (1.0 + SANDWICH_TOL)
    }
}

fn quad_solve(raster: &Raster, quad: &QuadRegion) -> Result<(QuadEstimate, Solution), ModulusError> {
    let pts: Vec<Complex64> = quad.vertices.iter().map(|p| to_c(*p)).collect();
    let domain = QuadDomain { quad, index: PolygonIndex::new(&pts) };
    let sol = solve(raster, &domain)?;

    let sides: Vec<Vec<Complex64>> = (0..4).map(|k| quad.side_image(raster, k)).collect();
    let polyline_gap = |a: &[Complex64], b: &[Complex64]| {
        let mut best = f64::INFINITY;
        for w in a.windows(2) {
            for v in b.windows(2) {
                for (p, s0, s1) in [(w[0], v[0], v[1]), (w[1], v[0], v[1]), (v[0], w[0], w[1]), (v[1], w[0], w[1])] {
                    best = best.min(point_segment(s0, s1, p).0);
                }
            }
        }
        best
    };
    let height = polyline_gap(&sides[0], &sides[2]);
    let width = polyline_gap(&sides[1], &sides[3]);
    let mut outline: Vec<Complex64> = Vec::new();
    for s in &sides {
        outline.extend_from_slice(&s[..s.len() - 1]);
    }
    let area = Boundary::Polyline(outline).area();
    let est = QuadEstimate {
        estimate: 1.0 / sol.energy,
        lower: height * height / area,
        upper: area / (width * width),
        energy: sol.energy,
        active_nodes: sol.active_count(),
        iterations: sol.iterations,
    };
    debug_assert!(est.sandwich_holds(), "quad sandwich violated: {} <= {} <= {}", est.lower, est.estimate, est.upper);
    Ok((est, sol))
}

/// Modulus of a quadrilateral (potential 0 on side 0, 1 on side 2).
pub fn quad_modulus(raster: &Raster, quad: &QuadRegion) -> Result<QuadEstimate, ModulusError> {
    quad_solve(raster, quad).map(|(e, _)| e)
}

/// Outcome of the check `1/mod A <= Σ 1/mod Q_i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadAnnulusReport {
    pub annulus_modulus: f64,
    pub quad_moduli: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs - lhs) / lhs`.
    pub margin: f64,
    pub holds: bool,
}

/// Compare the annulus modulus with the quadrilaterals covering it, all
/// solved on the same raster. The quadrilaterals must cover exactly the
/// annulus nodes; they may overlap.
pub fn verify_quad_annulus_inequality(
    region: &AnnulusRegion,
    raster: &Raster,
    quads: &[QuadRegion],
) -> Result<QuadAnnulusReport, ModulusError> {
    if quads.is_empty() {
        return Err(ModulusError::BadDecomposition("no quadrilaterals".into()));
    }
    let annulus = grid_modulus_on(region, raster)?;
    let (inner, outer) = region.boundaries();
    let in_annulus: Vec<bool> = (0..raster.len())
        .map(|k| {
            let z = raster.to_plane(raster.node(k / raster.nv, k % raster.nv));
            outer.contains(z) && !inner.contains(z)
        })
        .collect();
    let mut covered = vec![false; raster.len()];
    let mut quad_moduli = Vec::with_capacity(quads.len());
    for (i, q) in quads.iter().enumerate() {
        let (est, sol) = quad_solve(raster, q)?;
        for k in 0..raster.len() {
            if sol.inside[k] {
                if !in_annulus[k] {
                    return Err(ModulusError::BadDecomposition(format!("quadrilateral {i} leaves the annulus")));
                }
                covered[k] = true;
            }
        }
        quad_moduli.push(est.estimate);
    }
    if let Some(k) = (0..raster.len()).find(|&k| in_annulus[k] && !covered[k]) {
        let z = raster.to_plane(raster.node(k / raster.nv, k % raster.nv));
        return Err(ModulusError::BadDecomposition(format!("annulus point {z} is not covered")));
    }
    let lhs = 1.0 / annulus.estimate;
    let rhs: f64 = quad_moduli.iter().map(|m| 1.0 / m).sum();
    let margin = (rhs - lhs) / lhs;
    Ok(QuadAnnulusReport { annulus_modulus: annulus.estimate, quad_moduli, lhs, rhs, margin, holds: margin >= -LEMMA_SLACK })
}

/// Rectangular configuration of three overlapping quadrilaterals inside
/// `Q = [x0, x1] × [y0, y1]` (distinguished sides horizontal):
/// `Q1 = [x0, q1_right]`, `Q3 = [q3_left, x1]`, `Q2 = [beta1, beta3]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeQuadConfig {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub q1_right: f64,
    pub q3_left: f64,
    pub beta1: f64,
    pub beta3: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThreeQuadReport {
    pub mod_q: f64,
    pub mod_q1: f64,
    pub mod_q2: f64,
    pub mod_q3: f64,
    pub mod_q12: f64,
    pub mod_q23: f64,
    pub m: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Check `1/mod Q <= Σ M²/mod Q_i` with `M = max(mod Q12, mod Q23, 1)` on a
/// Cartesian raster of cell size `h`.
pub fn verify_three_quadrilateral_inequality(cfg: &ThreeQuadConfig, h: f64) -> Result<ThreeQuadReport, ModulusError> {
    let order = [cfg.x0, cfg.beta1, cfg.q1_right, cfg.q3_left, cfg.beta3, cfg.x1];
    if !order.windows(2).all(|w| w[0] < w[1]) {
        return Err(ModulusError::BadConfiguration(
            "need x0 < beta1 < q1_right < q3_left < beta3 < x1".into(),
        ));
    }
    if !(cfg.y0 < cfg.y1) || !(h > 0.0) {
        return Err(ModulusError::BadConfiguration("need y0 < y1 and h > 0".into()));
    }
    let nx = ((cfg.x1 - cfg.x0) / h).ceil() as usize + 4;
    let ny = ((cfg.y1 - cfg.y0) / h).ceil() as usize + 4;
    let raster = Raster::cartesian(cfg.x0 - 2.0 * h, cfg.y0 - 2.0 * h, h, nx, ny);
    let m = |a: f64, b: f64| quad_modulus(&raster, &QuadRegion::rectangle_horizontal(a, b, cfg.y0, cfg.y1)).map(|e| e.estimate);
    let mod_q = m(cfg.x0, cfg.x1)?;
    let mod_q1 = m(cfg.x0, cfg.q1_right)?;
    let mod_q2 = m(cfg.beta1, cfg.beta3)?;
    let mod_q3 = m(cfg.q3_left, cfg.x1)?;
    let mod_q12 = m(cfg.beta1, cfg.q1_right)?;
    let mod_q23 = m(cfg.q3_left, cfg.beta3)?;
    let big_m = mod_q12.max(mod_q23).max(1.0);
    let lhs = 1.0 / mod_q;
    let rhs = big_m * big_m * (1.0 / mod_q1 + 1.0 / mod_q2 + 1.0 / mod_q3);
    let margin = (rhs - lhs) / lhs;
    Ok(ThreeQuadReport {
        mod_q,
        mod_q1,
        mod_q2,
        mod_q3,
        mod_q12,
        mod_q23,
        m: big_m,
        lhs,
        rhs,
        margin,
        holds: margin >= -LEMMA_SLACK,
    })
}

/// The round annulus `{r1 < |z - z0| < r2}` with `r1` the farthest inner
/// boundary point from `z0` and `r2` the distance from `z0` to the outer
/// boundary. It separates the two boundary curves, so it is essential.
pub fn extract_round_annulus(region: &AnnulusRegion, z0: Complex64) -> Result<AnnulusRegion, ModulusError> {
    if let AnnulusKind::TwoDisks { .. } = region.kind {
        return Err(ModulusError::BadRegion("extraction needs a plane annulus (round or sampled)".into()));
    }
    let (inner, outer) = region.boundaries();
    let in_hull = match &inner {
        Boundary::Circle { .. } => inner.contains(z0),
        Boundary::Polyline(pts) => {
            let hull = convex_hull(pts);
            hull.len() >= 3 && Boundary::Polyline(hull.clone()).contains(z0) && Boundary::Polyline(hull).distance_to(z0) > 0.0
        }
    };
    if !in_hull {
        return Err(ModulusError::BadCenter);
    }
    let r1 = inner.max_distance_from(z0);
    let r2 = outer.distance_to(z0);
    if !(r1 < r2) || !outer.contains(z0) {
        return Err(ModulusError::NoRoundAnnulus { r1, r2 });
    }
    AnnulusRegion::round(z0, r1, r2)
}

/// Extraction together with the comparison against the grid modulus of the
/// input region.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundExtractionReport {
    pub center: Complex64,
    pub r1: f64,
    pub r2: f64,
    pub input_modulus: f64,
    pub extracted_modulus: f64,
    /// `input_modulus - 5 log 2 / (2π)`.
    pub bound: f64,
    /// Whether the input modulus exceeds `5 log 2 / (2π)`, the regime where
    /// the bound is meaningful.
    pub precondition_met: bool,
    pub holds: bool,
}

pub fn extract_round_annulus_report(
    region: &AnnulusRegion,
    z0: Complex64,
    resolution: usize,
) -> Result<RoundExtractionReport, ModulusError> {
    let round = extract_round_annulus(region, z0)?;
    let AnnulusKind::Round { r_in, r_out, .. } = round.kind else { unreachable!() };
    let input = grid_modulus(region, resolution)?;
    let extracted = round_modulus(r_in, r_out)?;
    let loss = 5.0 * LN_2 / (2.0 * PI);
    let bound = input.estimate - loss;
    Ok(RoundExtractionReport {
        center: z0,
        r1: r_in,
        r2: r_out,
        input_modulus: input.estimate,
        extracted_modulus: extracted,
        bound,
        precondition_met: input.estimate > loss,
        holds: extracted >= bound - LEMMA_SLACK,
    })
}
