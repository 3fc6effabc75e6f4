//! Discrete Dirichlet problem on a raster: cell-centred nodes, 5-point
//! stencil, boundary crossings located by bisection along grid edges
//! (Shortley–Weller weights), solved by conjugate gradients preconditioned
//! with an aggregation multigrid V-cycle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

use super::ModulusError;

/// Relative residual at which conjugate gradients stops.
pub const CG_TOL: f64 = 1e-10;
const CG_MAX_ITER: usize = 5000;
/// Piecewise-constant prolongation underestimates smooth errors; scaling the
/// coarse correction compensates (Braess' over-correction for aggregation).
const COARSE_OVERCORRECTION: f64 = 1.8;
/// Boundary crossings closer than this fraction of a cell are clamped.
const MIN_CROSSING: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RasterChart {
    /// Raster coordinates are `(x, y)`.
    Cartesian,
    /// Raster coordinates are `(log|z - center|, arg(z - center))`; the raster
    /// is periodic in the angle. Since the chart is conformal the Dirichlet
    /// energy is the same in either coordinate.
    LogPolar { center: Complex64 },
}

/// A uniform raster with square cells of side `h` in raster coordinates.
/// Node `(i, j)` sits at the cell centre `(u0 + (i + 1/2) h, v0 + (j + 1/2) h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub chart: RasterChart,
    pub u0: f64,
    pub v0: f64,
    pub h: f64,
    pub nu: usize,
    pub nv: usize,
    pub periodic: bool,
}

impl Raster {
    pub fn cartesian(x0: f64, y0: f64, h: f64, nx: usize, ny: usize) -> Self {
        Raster { chart: RasterChart::Cartesian, u0: x0, v0: y0, h, nu: nx, nv: ny, periodic: false }
    }

    /// Log-polar raster about `center` with `n_angle` angular cells, covering
    /// `log|z - center|` from `s_min` to `s_max` plus two cells of margin on
    /// either side.
    pub fn log_polar(center: Complex64, s_min: f64, s_max: f64, n_angle: usize) -> Self {
        let h = 2.0 * PI / n_angle as f64;
        let nu = ((s_max - s_min) / h).ceil() as usize + 4;
        Raster {
            chart: RasterChart::LogPolar { center },
            u0: s_min - 2.0 * h,
            v0: 0.0,
            h,
            nu,
            nv: n_angle,
            periodic: true,
        }
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u0 + (i as f64 + 0.5) * self.h, self.v0 + (j as f64 + 0.5) * self.h)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_plane(&self, p: (f64, f64)) -> Complex64 {
        match self.chart {
            RasterChart::Cartesian => Complex64::new(p.0, p.1),
            RasterChart::LogPolar { center } => center + Complex64::from_polar(p.0.exp(), p.1),
        }
    }

    /// Raster coordinates of a plane point (angle in `[v0, v0 + 2π)`).
    pub fn from_plane(&self, z: Complex64) -> (f64, f64) {
        match self.chart {
            RasterChart::Cartesian => (z.re, z.im),
            RasterChart::LogPolar { center } => {
                let w = z - center;
                let mut t = w.arg();
                while t < self.v0 {
                    t += 2.0 * PI;
                }
                (w.norm().ln(), t)
            }
        }
    }

    /// Side length in the plane of a cell at raster point `p`.
    pub fn cell_size(&self, p: (f64, f64)) -> f64 {
        match self.chart {
            RasterChart::Cartesian => self.h,
            RasterChart::LogPolar { .. } => p.0.exp() * self.h,
        }
    }
}

/// A region on a raster: membership of raster points and the boundary value
/// where a grid edge leaves the region.
pub trait Domain: Sync {
    fn inside(&self, p: (f64, f64)) -> bool;
    /// Boundary value at `crossing`, reached going from `inside` to `outside`;
    /// `None` for an insulated boundary piece.
    fn boundary_value(&self, inside: (f64, f64), outside: (f64, f64), crossing: (f64, f64)) -> Option<f64>;
}

/// Discrete harmonic potential and its Dirichlet energy.
#[derive(Clone, Debug)]
pub struct Solution {
    pub energy: f64,
    /// Raster-sized mask of nodes inside the region.
    pub inside: Vec<bool>,
    /// Raster-sized mask of nodes carrying unknowns (inside and connected to a
    /// Dirichlet boundary).
    pub active: Vec<bool>,
    pub potential: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

impl Solution {
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }
}

/// Five-point operator on a (possibly periodic) structured grid, with edge
/// weights stored towards `+u` (`east`) and `+v` (`north`).
#[derive(Clone, Debug)]
struct Level {
    nu: usize,
    nv: usize,
    periodic: bool,
    active: Vec<bool>,
    diag: Vec<f64>,
    east: Vec<f64>,
    north: Vec<f64>,
}

impl Level {
    fn north_of(&self, k: usize) -> Option<usize> {
        let j = k % self.nv;
        if j + 1 < self.nv {
            Some(k + 1)
        } else if self.periodic && self.nv > 1 {
            Some(k + 1 - self.nv)
        } else {
            None
        }
    }

    fn south_of(&self, k: usize) -> Option<usize> {
        let j = k % self.nv;
        if j > 0 {
            Some(k - 1)
        } else if self.periodic && self.nv > 1 {
            Some(k + self.nv - 1)
        } else {
            None
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for k in 0..x.len() {
            y[k] = if self.active[k] { self.diag[k] * x[k] } else { 0.0 };
        }
        let n = x.len();
        for k in 0..n {
            let e = self.east[k];
            if e != 0.0 {
                let k2 = k + self.nv;
                y[k] -= e * x[k2];
                y[k2] -= e * x[k];
            }
            let w = self.north[k];
            if w != 0.0 {
                let k2 = self.north_of(k).unwrap();
                y[k] -= w * x[k2];
                y[k2] -= w * x[k];
            }
        }
    }

    fn neighbour_sum(&self, x: &[f64], k: usize) -> f64 {
        let mut s = 0.0;
        if self.east[k] != 0.0 {
            s += self.east[k] * x[k + self.nv];
        }
        if k >= self.nv && self.east[k - self.nv] != 0.0 {
            s += self.east[k - self.nv] * x[k - self.nv];
        }
        if self.north[k] != 0.0 {
            s += self.north[k] * x[self.north_of(k).unwrap()];
        }
        if let Some(ks) = self.south_of(k) {
            if self.north[ks] != 0.0 {
                s += self.north[ks] * x[ks];
            }
        }
        s
    }

    fn gauss_seidel(&self, x: &mut [f64], b: &[f64], forward: bool) {
        let n = x.len();
        for step in 0..n {
            let k = if forward { step } else { n - 1 - step };
            if self.active[k] {
                x[k] = (b[k] + self.neighbour_sum(x, k)) / self.diag[k];
            }
        }
    }

    /// Galerkin coarsening with 2×2 aggregates and piecewise-constant
    /// prolongation; the coarse operator stays five-point.
    fn coarsen(&self) -> Level {
        let (cu, cv) = (self.nu.div_ceil(2), self.nv.div_ceil(2));
        let n = cu * cv;
        let mut c = Level {
            nu: cu,
            nv: cv,
            periodic: self.periodic,
            active: vec![false; n],
            diag: vec![0.0; n],
            east: vec![0.0; n],
            north: vec![0.0; n],
        };
        let agg = |k: usize| (k / self.nv / 2) * cv + (k % self.nv) / 2;
        for k in 0..self.active.len() {
            if self.active[k] {
                let a = agg(k);
                c.active[a] = true;
                c.diag[a] += self.diag[k];
            }
        }
        for k in 0..self.active.len() {
            let a = agg(k);
            let e = self.east[k];
            if e != 0.0 {
                let b = agg(k + self.nv);
                if a == b {
                    c.diag[a] -= 2.0 * e;
                } else {
                    c.east[a] += e;
                }
            }
            let w = self.north[k];
            if w != 0.0 {
                let b = agg(self.north_of(k).unwrap());
                if a == b {
                    c.diag[a] -= 2.0 * w;
                } else {
                    c.north[a] += w;
                }
            }
        }
        c
    }

    fn restrict(&self, r: &[f64], coarse: &Level) -> Vec<f64> {
        let mut out = vec![0.0; coarse.active.len()];
        for (k, v) in r.iter().enumerate() {
            if self.active[k] {
                out[(k / self.nv / 2) * coarse.nv + (k % self.nv) / 2] += v;
            }
        }
        out
    }

    fn prolong_add(&self, e: &[f64], coarse: &Level, x: &mut [f64]) {
        for (k, xk) in x.iter_mut().enumerate() {
            if self.active[k] {
                *xk += e[(k / self.nv / 2) * coarse.nv + (k % self.nv) / 2];
            }
        }
    }
}

enum Coarsest {
    Dense { index: Vec<usize>, chol: nalgebra::Cholesky<f64, nalgebra::Dyn> },
    Smooth,
}

struct Multigrid {
    levels: Vec<Level>,
    coarsest: Coarsest,
}

impl Multigrid {
    fn new(fine: Level) -> Self {
        let mut levels = vec![fine];
        loop {
            let l = levels.last().unwrap();
            let active = l.active.iter().filter(|a| **a).count();
            let min_periodic = if l.periodic { 8 } else { 2 };
            if active <= 400 || l.nu < 4 || l.nv < min_periodic {
                break;
            }
            let c = l.coarsen();
            levels.push(c);
        }
        let last = levels.last().unwrap();
        let index: Vec<usize> = (0..last.active.len()).filter(|&k| last.active[k]).collect();
        let coarsest = if index.len() <= 3000 {
            let mut pos = vec![usize::MAX; last.active.len()];
            for (p, &k) in index.iter().enumerate() {
                pos[k] = p;
            }
            let m = index.len();
            let mut a = DMatrix::<f64>::zeros(m, m);
            for (p, &k) in index.iter().enumerate() {
                a[(p, p)] += last.diag[k];
                if last.east[k] != 0.0 {
                    let q = pos[k + last.nv];
                    a[(p, q)] -= last.east[k];
                    a[(q, p)] -= last.east[k];
                }
                if last.north[k] != 0.0 {
                    let q = pos[last.north_of(k).unwrap()];
                    a[(p, q)] -= last.north[k];
                    a[(q, p)] -= last.north[k];
                }
            }
            match a.cholesky() {
                Some(chol) => Coarsest::Dense { index, chol },
                None => Coarsest::Smooth,
            }
        } else {
            Coarsest::Smooth
        };
        Multigrid { levels, coarsest }
    }

    fn vcycle(&self, l: usize, b: &[f64]) -> Vec<f64> {
        let level = &self.levels[l];
        let mut x = vec![0.0; b.len()];
        if l + 1 == self.levels.len() {
            match &self.coarsest {
                Coarsest::Dense { index, chol } => {
                    let rhs = DVector::from_iterator(index.len(), index.iter().map(|&k| b[k]));
                    let sol = chol.solve(&rhs);
                    for (p, &k) in index.iter().enumerate() {
                        x[k] = sol[p];
                    }
                }
                Coarsest::Smooth => {
                    for _ in 0..50 {
                        level.gauss_seidel(&mut x, b, true);
                        level.gauss_seidel(&mut x, b, false);
                    }
                }
            }
            return x;
        }
        level.gauss_seidel(&mut x, b, true);
        level.gauss_seidel(&mut x, b, true);
        let mut ax = vec![0.0; b.len()];
        level.apply(&x, &mut ax);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let coarse = &self.levels[l + 1];
        let rc = level.restrict(&r, coarse);
        let mut ec = self.vcycle(l + 1, &rc);
        ec.iter_mut().for_each(|e| *e *= COARSE_OVERCORRECTION);
        level.prolong_add(&ec, coarse, &mut x);
        level.gauss_seidel(&mut x, b, false);
        level.gauss_seidel(&mut x, b, false);
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve the discrete Dirichlet problem of `domain` on `raster`.
pub fn solve(raster: &Raster, domain: &dyn Domain) -> Result<Solution, ModulusError> {
    let (nu, nv, h) = (raster.nu, raster.nv, raster.h);
    let n = raster.len();
    let mut inside = vec![false; n];
    for i in 0..nu {
        for j in 0..nv {
            inside[i * nv + j] = domain.inside(raster.node(i, j));
        }
    }

    let mut east = vec![0.0; n];
    let mut north = vec![0.0; n];
    let mut dir_c = vec![0.0; n];
    let mut dir_cv = vec![0.0; n];
    let mut dir_cv2 = vec![0.0; n];
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..nu {
        for j in 0..nv {
            let k = i * nv + j;
            if !inside[k] {
                continue;
            }
            let p = raster.node(i, j);
            let steps = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)];
            for (dir, (du, dv)) in steps.into_iter().enumerate() {
                let q = (p.0 + du, p.1 + dv);
                let neighbour = match dir {
                    0 => (i + 1 < nu).then(|| k + nv),
                    1 => (i > 0).then(|| k - nv),
                    2 => {
                        if j + 1 < nv {
                            Some(k + 1)
                        } else if raster.periodic {
                            Some(k + 1 - nv)
                        } else {
                            None
                        }
                    }
                    _ => {
                        if j > 0 {
                            Some(k - 1)
                        } else if raster.periodic {
                            Some(k + nv - 1)
                        } else {
                            None
                        }
                    }
                };
                // across the periodic seam the domain is asked directly, so
                // regions cut along the seam see it as boundary
                let wrapped = (dir == 2 && j + 1 == nv) || (dir == 3 && j == 0);
                let q_inside = match neighbour {
                    Some(kq) if !wrapped => inside[kq],
                    _ => domain.inside(q),
                };
                if q_inside {
                    match neighbour {
                        Some(kq) if inside[kq] => {
                            // interior edge, stored once from its -u / -v end
                            if dir == 0 {
                                east[k] = 1.0;
                            } else if dir == 2 {
                                north[k] = 1.0;
                            }
                        }
                        _ => {}
                    }
                    continue;
                }
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    if domain.inside((p.0 + mid * du, p.1 + mid * dv)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let theta = 0.5 * (lo + hi);
                let x = (p.0 + theta * du, p.1 + theta * dv);
                if let Some(value) = domain.boundary_value(p, q, x) {
                    let c = 1.0 / theta.max(MIN_CROSSING);
                    dir_c[k] += c;
                    dir_cv[k] += c * value;
                    dir_cv2[k] += c * value * value;
                    vmin = vmin.min(value);
                    vmax = vmax.max(value);
                }
            }
        }
    }

    // keep only components touching a Dirichlet boundary
    let mut active = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&k| inside[k] && dir_c[k] > 0.0).collect();
    for &k in &queue {
        active[k] = true;
    }
    let level_shape = Level {
        nu,
        nv,
        periodic: raster.periodic,
        active: inside.clone(),
        diag: vec![0.0; n],
        east: east.clone(),
        north: north.clone(),
    };
    while let Some(k) = queue.pop_front() {
        let visit = |m: usize, active: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
            if inside[m] && !active[m] {
                active[m] = true;
                queue.push_back(m);
            }
        };
        if east[k] != 0.0 {
            visit(k + nv, &mut active, &mut queue);
        }
        if k >= nv && east[k - nv] != 0.0 {
            visit(k - nv, &mut active, &mut queue);
        }
        if north[k] != 0.0 {
            visit(level_shape.north_of(k).unwrap(), &mut active, &mut queue);
        }
        if let Some(ks) = level_shape.south_of(k) {
            if north[ks] != 0.0 {
                visit(ks, &mut active, &mut queue);
            }
        }
    }
    if !active.iter().any(|a| *a) {
        return Err(ModulusError::GridTooCoarse("no interior nodes connected to the boundary".into()));
    }
    if !(vmax > vmin) {
        return Err(ModulusError::GridTooCoarse("only one boundary value reached by the raster".into()));
    }

    let mut diag = vec![0.0; n];
    for k in 0..n {
        if !active[k] {
            east[k] = 0.0;
            north[k] = 0.0;
        }
    }
    for k in 0..n {
        if !active[k] {
            continue;
        }
        diag[k] += dir_c[k];
        if east[k] != 0.0 {
            diag[k] += east[k];
            diag[k + nv] += east[k];
        }
        if north[k] != 0.0 {
            diag[k] += north[k];
            diag[level_shape.north_of(k).unwrap()] += north[k];
        }
    }
    let fine = Level { nu, nv, periodic: raster.periodic, active: active.clone(), diag, east, north };
    let b: Vec<f64> = (0..n).map(|k| if active[k] { dir_cv[k] } else { 0.0 }).collect();
    let bnorm = dot(&b, &b).sqrt();

    let mg = Multigrid::new(fine);
    let a = &mg.levels[0];
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z = mg.vcycle(0, &r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    let mut rel = if bnorm > 0.0 { 1.0 } else { 0.0 };
    while rel > CG_TOL {
        if iterations == CG_MAX_ITER {
            return Err(ModulusError::NoConvergence { iterations, residual: rel });
        }
        iterations += 1;
        a.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= CG_TOL {
            break;
        }
        z = mg.vcycle(0, &r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }

    let mut energy = 0.0;
    for k in 0..n {
        if !a.active[k] {
            continue;
        }
        if a.east[k] != 0.0 {
            energy += a.east[k] * (x[k] - x[k + nv]).powi(2);
        }
        if a.north[k] != 0.0 {
            energy += a.north[k] * (x[k] - x[a.north_of(k).unwrap()]).powi(2);
        }
        energy += dir_c[k] * x[k] * x[k] - 2.0 * dir_cv[k] * x[k] + dir_cv2[k];
    }
    Ok(Solution { energy, inside, active, potential: x, iterations, relative_residual: rel })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rectangle `[0, a] × [0, 1]` with 0 at the bottom, 1 at the top.
    struct Rect {
        a: f64,
    }

    impl Domain for Rect {
        fn inside(&self, p: (f64, f64)) -> bool {
            p.0 > 0.0 && p.0 < self.a && p.1 > 0.0 && p.1 < 1.0
        }
        fn boundary_value(&self, _: (f64, f64), _: (f64, f64), x: (f64, f64)) -> Option<f64> {
            if x.1 <= 1e-9 {
                Some(0.0)
            } else if x.1 >= 1.0 - 1e-9 {
                Some(1.0)
            } else {
                None
            }
        }
    }

    #[test]
    fn rectangle_energy_is_width_over_height() {
        // the linear potential is reproduced exactly, so E = a / 1
        let raster = Raster::cartesian(0.0, 0.0, 1.0 / 32.0, 64, 32);
        let sol = solve(&raster, &Rect { a: 2.0 }).unwrap();
        assert!((sol.energy - 2.0).abs() < 1e-9, "{}", sol.energy);
        assert!(sol.relative_residual <= CG_TOL);
    }

    #[test]
    fn offset_raster_uses_fractional_crossings() {
        // nodes do not line up with the boundary; linear potential still exact
        let raster = Raster::cartesian(-0.013, -0.021, 1.0 / 25.0, 60, 30);
        let sol = solve(&raster, &Rect { a: 2.0 }).unwrap();
        assert!((sol.energy - 2.0).abs() < 1e-6, "{}", sol.energy);
    }

    #[test]
    fn plane_round_trip() {
        let r = Raster::log_polar(Complex64::new(1.0, -1.0), -1.0, 2.0, 64);
        let p = (0.3, 2.0);
        let q = r.from_plane(r.to_plane(p));
        assert!((p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
    }
}
