//! Periodic points, multipliers and their classification, critical orbits,
//! and the diameter probe for iterated preimages of a disk.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;
use thiserror::Error;

use crate::poly::{self, RootError};
use crate::rational::{ChartError, MapError, RationalMap};
use crate::series::Series;
use crate::sphere::{chord, chordal_distance, Chart, SpherePoint};

/// Multipliers below this modulus count as superattracting.
pub const SUPERATTRACTING_TOL: f64 = 1e-10;
/// Width of the indifferent band around the unit circle, and the tolerance for
/// matching a root of unity.
pub const INDIFFERENT_TOL: f64 = 1e-6;
/// Largest rotation denominator searched for.
pub const MAX_ROTATION_DENOMINATOR: u32 = 64;
/// Residual accepted by [`classify`] for the input point.
pub const PERIOD_RESIDUAL_TOL: f64 = 1e-8;

const MAX_PERIOD: usize = 8;
const MAX_PROBE_COMPONENTS: f64 = 1e6;
const CLUSTER_TOL: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("period {period} too large for degree {degree} (f^p must have degree <= 64 and p <= 8)")]
    PeriodTooLarge { period: usize, degree: usize },
    #[error("point is not periodic: chordal residual {residual:e}")]
    NotPeriodic { residual: f64 },
    #[error("indifferent multiplier {multiplier} has no resolved rational rotation")]
    UnresolvedIndifferent { multiplier: Complex64 },
    #[error("probe depth would need {components} components (limit 1e6)")]
    DepthTooLarge { components: f64 },
    #[error("disk radius must lie in (0, 2), got {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    RootFinding(#[from] RootError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Superattracting,
    Attracting,
    Repelling,
    Parabolic,
    IrrationallyIndifferent,
}

impl PointClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointClass::Superattracting => "superattracting",
            PointClass::Attracting => "attracting",
            PointClass::Repelling => "repelling",
            PointClass::Parabolic => "parabolic",
            PointClass::IrrationallyIndifferent => "irrationally_indifferent",
        }
    }

    pub fn is_attracting(&self) -> bool {
        matches!(self, PointClass::Superattracting | PointClass::Attracting)
    }
}

/// Rotation number `p/q` in lowest terms; a multiplier of 1 has rotation 1/1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rotation {
    pub p: u32,
    pub q: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub location: SpherePoint,
    pub period: usize,
    pub multiplier: Complex64,
    pub class: PointClass,
    pub rotation: Option<Rotation>,
    /// Parabolic multiplicity `kq + 1`.
    pub multiplicity: Option<u32>,
    /// First non-vanishing coefficient `c_kq` beyond the linear term of `f^{pq}`.
    pub leading_coefficient: Option<Complex64>,
    /// Multiplicity as a root of `f^p(z) = z` (only set by [`periodic_points`]).
    pub root_multiplicity: u32,
}

/// Numerator and denominator of `f^p` as homogeneous compositions.
pub fn iterate_polynomials(map: &RationalMap, p: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let d = map.degree();
    let pad = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.resize(d + 1, Complex64::new(0.0, 0.0));
        v
    };
    let (a, b) = (pad(map.numerator()), pad(map.denominator()));
    let mut n = map.numerator().to_vec();
    let mut den = map.denominator().to_vec();
    for _ in 1..p {
        let mut npow = vec![vec![Complex64::new(1.0, 0.0)]];
        let mut dpow = vec![vec![Complex64::new(1.0, 0.0)]];
        for j in 1..=d {
            npow.push(poly::mul(&npow[j - 1], &n));
            dpow.push(poly::mul(&dpow[j - 1], &den));
        }
        let mut nn = vec![];
        let mut dd = vec![];
        for j in 0..=d {
            let term = poly::mul(&npow[j], &dpow[d - j]);
            nn = poly::add(&nn, &poly::scale(&term, a[j]));
            dd = poly::add(&dd, &poly::scale(&term, b[j]));
        }
        n = poly::trim(nn);
        den = poly::trim(dd);
    }
    (n, den)
}

/// Image of `z` under `f^p` together with the derivative of `f^p`, using the
/// chart of `z` for the source and `target` for the image.
fn orbit_derivative(
    map: &RationalMap,
    z: &SpherePoint,
    p: usize,
    target: Chart,
) -> Result<(SpherePoint, Complex64), ChartError> {
    let mut cur = *z;
    let mut deriv = Complex64::new(1.0, 0.0);
    for i in 0..p {
        let next = map.eval(&cur);
        let dst = if i + 1 == p { target } else { next.chart() };
        deriv *= map.derivative_in_charts(&cur, dst)?;
        cur = next;
    }
    Ok((cur, deriv))
}

/// Newton's method for `f^p(z) = z` in the chart of `z`, with step factor
/// `m` (the expected root multiplicity). Keeps the iterate of least residual.
fn newton_periodic(map: &RationalMap, z: &SpherePoint, p: usize, m: f64, steps: usize) -> SpherePoint {
    let residual = |pt: &SpherePoint| chordal_distance(&map.iterate(p, pt), pt);
    let mut best = *z;
    let mut best_res = residual(z);
    let mut pt = *z;
    for _ in 0..steps {
        let chart = pt.chart();
        let Ok((img, deriv)) = orbit_derivative(map, &pt, p, chart) else {
            break;
        };
        let g = img.coordinate(chart) - pt.value();
        let dg = deriv - 1.0;
        if dg.norm() == 0.0 || !g.is_finite() {
            break;
        }
        let step = m * g / dg;
        if !step.is_finite() {
            break;
        }
        let u = pt.value() - step;
        pt = SpherePoint::from_coordinate(u, chart);
        let r = residual(&pt);
        if r < best_res {
            best = pt;
            best_res = r;
        }
        if best_res == 0.0 || step.norm() <= 1e-16 * (1.0 + u.norm()) {
            break;
        }
    }
    best
}

/// Continued-fraction search for `p/q` with `q <= 64` such that
/// `|λ - e^{2πi p/q}| < 1e-6`.
pub fn detect_rotation(lambda: Complex64) -> Option<Rotation> {
    let mut x = lambda.arg() / (2.0 * PI);
    x -= x.floor();
    let (mut h_prev, mut h) = (0i64, 1i64);
    let (mut k_prev, mut k) = (1i64, 0i64);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor() as i64;
        let (h_new, k_new) = (a * h + h_prev, a * k + k_prev);
        h_prev = h;
        k_prev = k;
        h = h_new;
        k = k_new;
        if k > MAX_ROTATION_DENOMINATOR as i64 {
            break;
        }
        let root = Complex64::from_polar(1.0, 2.0 * PI * h as f64 / k as f64);
        if (lambda - root).norm() < INDIFFERENT_TOL {
            let q = k as u32;
            let p = (h.rem_euclid(k)) as u32;
            return Some(if p == 0 { Rotation { p: 1, q: 1 } } else { Rotation { p, q } });
        }
        let rem = frac - a as f64;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    None
}

/// Classify a periodic point: multiplier, class and, for parabolic points,
/// rotation number, multiplicity `kq + 1` and the coefficient `c_kq`.
pub fn classify(map: &RationalMap, point: &SpherePoint, period: usize) -> Result<PeriodicPoint, DynamicsError> {
    if period == 0 {
        return Err(DynamicsError::ZeroPeriod);
    }
    let mut orbit = Vec::with_capacity(period + 1);
    orbit.push(*point);
    for i in 0..period {
        orbit.push(map.eval(&orbit[i]));
    }
    let residual = chordal_distance(&orbit[period], point);
    if residual > PERIOD_RESIDUAL_TOL {
        return Err(DynamicsError::NotPeriodic { residual });
    }
    let cycle = &orbit[..period];
    let target = |i: usize| cycle[(i + 1) % period].chart();
    let mut lambda = Complex64::new(1.0, 0.0);
    for (i, z) in cycle.iter().enumerate() {
        lambda *= map.derivative_in_charts(z, target(i))?;
    }
    let modulus = lambda.norm();
    let mut out = PeriodicPoint {
        location: *point,
        period,
        multiplier: lambda,
        class: PointClass::Repelling,
        rotation: None,
        multiplicity: None,
        leading_coefficient: None,
        root_multiplicity: 1,
    };
    if modulus < SUPERATTRACTING_TOL {
        out.class = PointClass::Superattracting;
        return Ok(out);
    }
    if modulus < 1.0 - INDIFFERENT_TOL {
        out.class = PointClass::Attracting;
        return Ok(out);
    }
    if modulus > 1.0 + INDIFFERENT_TOL {
        return Ok(out);
    }
    let unresolved = DynamicsError::UnresolvedIndifferent { multiplier: lambda };
    let rotation = detect_rotation(lambda).ok_or(unresolved.clone())?;
    let q = rotation.q as usize;
    let order = (2 * q + 2).min(130);
    // Taylor series of f^{q·period} at the point, composed step by step
    let mut g = Series::identity(order);
    for i in 0..q * period {
        let z = &cycle[i % period];
        let mut step = map.local_series(z, target(i % period), order);
        let mut c = step.coeffs().to_vec();
        c[0] = Complex64::new(0.0, 0.0);
        step = Series::new(c, order);
        g = step.compose(&g);
    }
    let first = (2..=order).find(|&j| g.coeff(j).norm() > INDIFFERENT_TOL);
    let m = first.ok_or(unresolved.clone())?;
    if (m - 1) % q != 0 {
        return Err(unresolved);
    }
    out.class = PointClass::Parabolic;
    out.rotation = Some(rotation);
    out.multiplicity = Some(m as u32);
    out.leading_coefficient = Some(g.coeff(m));
    Ok(out)
}

fn sort_key(p: &SpherePoint) -> (bool, f64, f64) {
    match p.to_finite() {
        Some(z) => (false, z.re, z.im),
        None => (true, 0.0, 0.0),
    }
}

/// All solutions of `f^p(z) = z` with multiplicity, one entry per distinct
/// point. Each entry carries its exact period (which divides `period`).
pub fn periodic_points(map: &RationalMap, period: usize) -> Result<Vec<PeriodicPoint>, DynamicsError> {
    if period == 0 {
        return Err(DynamicsError::ZeroPeriod);
    }
    let d = map.degree();
    if d < 2 {
        return Err(MapError::DegreeTooSmall.into());
    }
    let too_large = DynamicsError::PeriodTooLarge { period, degree: d };
    if period > MAX_PERIOD {
        return Err(too_large);
    }
    let total = (d as f64).powi(period as i32);
    if total > 64.0 {
        return Err(too_large);
    }
    let total = total as usize;
    let (n, den) = iterate_polynomials(map, period);
    let z_den = poly::mul(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], &den);
    let g = poly::trim_relative(poly::sub(&n, &z_den), 1e-13);
    let mut raw: Vec<SpherePoint> = if g.len() > 1 {
        poly::roots(&g)?.into_iter().map(SpherePoint::finite).collect()
    } else {
        Vec::new()
    };
    let at_infinity = (total + 1).saturating_sub(raw.len());
    raw = raw
        .into_iter()
        .map(|z| newton_periodic(map, &z, period, 1.0, 100))
        .collect();
    raw.extend(std::iter::repeat_n(SpherePoint::INFINITY, at_infinity));

    // single-linkage clustering of numerically coincident roots
    let mut cluster_of: Vec<usize> = (0..raw.len()).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..raw.len() {
        for j in 0..i {
            if chordal_distance(&raw[i], &raw[j]) < CLUSTER_TOL {
                let (a, b) = (find(&mut cluster_of, i), find(&mut cluster_of, j));
                if a != b {
                    cluster_of[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_index = std::collections::HashMap::new();
    for i in 0..raw.len() {
        let r = find(&mut cluster_of, i);
        let g = *root_index.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }

    let mut out = Vec::with_capacity(groups.len());
    for members in groups {
        let mult = members.len();
        let point = if members.iter().any(|&i| raw[i].is_infinity()) {
            SpherePoint::INFINITY
        } else if mult == 1 {
            raw[members[0]]
        } else {
            let chart = raw[members[0]].chart();
            let mean = members
                .iter()
                .map(|&i| raw[i].coordinate(chart))
                .sum::<Complex64>()
                / mult as f64;
            let start = SpherePoint::from_coordinate(mean, chart);
            newton_periodic(map, &start, period, mult as f64, 30)
        };
        let exact = (1..=period)
            .filter(|k| period.is_multiple_of(*k))
            .find(|&k| chordal_distance(&map.iterate(k, &point), &point) < PERIOD_RESIDUAL_TOL)
            .unwrap_or(period);
        let mut pp = match classify(map, &point, exact) {
            Ok(pp) => pp,
            Err(DynamicsError::UnresolvedIndifferent { multiplier }) => PeriodicPoint {
                location: point,
                period: exact,
                multiplier,
                class: PointClass::IrrationallyIndifferent,
                rotation: None,
                multiplicity: None,
                leading_coefficient: None,
                root_multiplicity: 1,
            },
            Err(e) => return Err(e),
        };
        pp.root_multiplicity = mult as u32;
        out.push(pp);
    }
    out.sort_by(|a, b| {
        sort_key(&a.location)
            .partial_cmp(&sort_key(&b.location))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitStatus {
    /// Landed on or converged geometrically to a non-parabolic cycle.
    Cycle,
    /// Converging algebraically to a parabolic cycle.
    ParabolicApproach,
    /// Escaped to infinity (polynomials only).
    Escaped,
    /// No limiting behaviour resolved within the budget.
    Unresolved,
}

/// Sampled forward orbit of one critical point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitReport {
    pub critical_point: SpherePoint,
    /// Orbit samples (every iterate up to 1000, then logarithmically spaced).
    pub samples: Vec<SpherePoint>,
    pub sample_indices: Vec<usize>,
    pub limit_cycle: Option<Vec<PeriodicPoint>>,
    pub escaped: bool,
    pub status: OrbitStatus,
    pub iterations: usize,
    /// Fitted exponent `a` in `dist(f^n(c), cycle) ~ C n^{-a}` for parabolic
    /// approach, over the last decade of iterates.
    pub decay_exponent: Option<f64>,
}

impl OrbitReport {
    /// A finite probe can only say whether the orbit behaves like one in a
    /// geometrically finite map; it never certifies it.
    pub fn consistent_with_geometric_finiteness(&self) -> bool {
        self.status != OrbitStatus::Unresolved
    }
}

/// For a polynomial, a radius beyond which every orbit escapes to infinity;
/// `None` for other maps.
pub fn escape_radius(map: &RationalMap) -> Option<f64> {
    if !map.is_polynomial() {
        return None;
    }
    let a = map.numerator();
    let lead = a.last().unwrap().norm() / map.denominator()[0].norm();
    let rest: f64 = a[..a.len() - 1].iter().map(|c| c.norm()).sum::<f64>() / map.denominator()[0].norm();
    Some((2.0 * (1.0 + rest) / lead).max(4.0))
}

fn cycle_points(map: &RationalMap, y: &SpherePoint, period: usize) -> Vec<PeriodicPoint> {
    let mut out = Vec::with_capacity(period);
    let mut z = *y;
    for _ in 0..period {
        if let Ok(pp) = classify(map, &z, period) {
            out.push(pp);
        }
        z = map.eval(&z);
    }
    out
}

fn fit_decay(indices: &[usize], dists: &[f64], from: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = indices
        .iter()
        .zip(dists)
        .filter(|(n, d)| **n >= from && **d > 0.0)
        .map(|(n, d)| ((*n as f64).ln(), d.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

fn orbit_of(map: &RationalMap, c: SpherePoint, max_iter: usize, tol: f64) -> OrbitReport {
    const WINDOW: usize = 64;
    let radius = escape_radius(map);
    let mut samples = vec![c];
    let mut indices = vec![0usize];
    let mut next_sample = 1usize;
    let mut history: VecDeque<SpherePoint> = VecDeque::with_capacity(WINDOW + 1);
    history.push_back(c);
    let mut z = c;
    let mut parabolic: Option<Vec<PeriodicPoint>> = None;
    let mut last_refine = 0usize;
    let report = |status, limit_cycle, escaped, n, samples: Vec<SpherePoint>, indices: Vec<usize>| OrbitReport {
        critical_point: c,
        samples,
        sample_indices: indices,
        limit_cycle,
        escaped,
        status,
        iterations: n,
        decay_exponent: None,
    };
    for n in 1..=max_iter {
        z = map.eval(&z);
        if n == next_sample {
            samples.push(z);
            indices.push(n);
            next_sample = if n < 1000 { n + 1 } else { (n + 1).max((n as f64 * 1.01).ceil() as usize) };
        }
        if parabolic.is_none() {
            let candidate = (1..=history.len()).find(|&p| {
                chordal_distance(&z, &history[history.len() - p]) < tol
            });
            if let Some(p) = candidate {
                if n >= last_refine + 16 || n <= WINDOW {
                    last_refine = n;
                    let y = newton_periodic(map, &z, p, 1.0, 100);
                    if chordal_distance(&map.iterate(p, &y), &y) < PERIOD_RESIDUAL_TOL {
                        let exact = (1..=p)
                            .filter(|k| p % k == 0)
                            .find(|&k| chordal_distance(&map.iterate(k, &y), &y) < PERIOD_RESIDUAL_TOL)
                            .unwrap_or(p);
                        match classify(map, &y, exact) {
                            Ok(pp) if pp.class == PointClass::Parabolic => {
                                let m = pp.multiplicity.unwrap_or(2) as f64;
                                let y = newton_periodic(map, &y, exact, m, 60);
                                parabolic = Some(cycle_points(map, &y, exact));
                            }
                            Ok(_) => {
                                let cycle = cycle_points(map, &y, exact);
                                if n < next_sample || indices.last() != Some(&n) {
                                    samples.push(z);
                                    indices.push(n);
                                }
                                return report(OrbitStatus::Cycle, Some(cycle), false, n, samples, indices);
                            }
                            Err(_) => {}
                        }
                    }
                }
            }
        }
        if let Some(r) = radius {
            let escaped = match z.to_finite() {
                Some(v) => v.norm() > r,
                None => true,
            };
            if escaped {
                if indices.last() != Some(&n) {
                    samples.push(z);
                    indices.push(n);
                }
                let cycle = classify(map, &SpherePoint::INFINITY, 1).ok().map(|p| vec![p]);
                return report(OrbitStatus::Escaped, cycle, true, n, samples, indices);
            }
        }
        history.push_back(z);
        if history.len() > WINDOW {
            history.pop_front();
        }
    }
    if indices.last() != Some(&max_iter) && max_iter > 0 {
        samples.push(z);
        indices.push(max_iter);
    }
    match parabolic {
        Some(cycle) if !cycle.is_empty() => {
            let dists: Vec<f64> = samples
                .iter()
                .map(|s| {
                    cycle
                        .iter()
                        .map(|p| chordal_distance(s, &p.location))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let exponent = fit_decay(&indices, &dists, max_iter / 10);
            let mut r = report(OrbitStatus::ParabolicApproach, Some(cycle), false, max_iter, samples, indices);
            r.decay_exponent = exponent;
            r
        }
        _ => report(OrbitStatus::Unresolved, None, false, max_iter, samples, indices),
    }
}

/// Forward orbits of all distinct critical points.
pub fn postcritical_orbit(map: &RationalMap, max_iter: usize, tol: f64) -> Result<Vec<OrbitReport>, DynamicsError> {
    let max_iter = max_iter.min(1_000_000);
    let crit = map.critical_points()?;
    let mut distinct: Vec<SpherePoint> = Vec::new();
    for c in crit {
        if distinct.iter().all(|d| chordal_distance(d, &c) > 1e-8) {
            distinct.push(c);
        }
    }
    Ok(distinct
        .into_par_iter()
        .map(|c| orbit_of(map, c, max_iter, tol))
        .collect())
}

/// Points on the boundary of the chordal disk of the given radius.
pub fn chordal_circle(center: &SpherePoint, radius: f64, samples: usize) -> Vec<SpherePoint> {
    let c = center.embed();
    let alpha = 2.0 * (radius / 2.0).asin();
    // orthonormal frame perpendicular to c
    let helper = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = helper[0] * c[0] + helper[1] * c[1] + helper[2] * c[2];
    let mut e1 = [helper[0] - dot * c[0], helper[1] - dot * c[1], helper[2] - dot * c[2]];
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|x| *x /= n1);
    let e2 = [
        c[1] * e1[2] - c[2] * e1[1],
        c[2] * e1[0] - c[0] * e1[2],
        c[0] * e1[1] - c[1] * e1[0],
    ];
    (0..samples)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / samples as f64;
            let (s, co) = phi.sin_cos();
            let p: [f64; 3] = std::array::from_fn(|i| {
                alpha.cos() * c[i] + alpha.sin() * (co * e1[i] + s * e2[i])
            });
            SpherePoint::from_embedding(p)
        })
        .collect()
}

/// Lift a closed curve through all branches of `f^{-1}`, following each branch
/// by nearest-preimage continuation.
fn lift_curve(map: &RationalMap, curve: &[SpherePoint]) -> Result<Vec<Vec<SpherePoint>>, RootError> {
    let d = map.degree();
    let start = map.preimages(&curve[0])?;
    let mut lifts: Vec<Vec<SpherePoint>> = start.into_iter().map(|p| vec![p]).collect();
    for z in &curve[1..] {
        let pre = map.preimages(z)?;
        let mut used = vec![false; pre.len()];
        for branch in lifts.iter_mut() {
            let prev = *branch.last().unwrap();
            let mut best = None;
            let mut best_d = f64::INFINITY;
            for (j, p) in pre.iter().enumerate() {
                let dist = chordal_distance(&prev, p);
                if !used[j] && dist < best_d {
                    best_d = dist;
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                used[j] = true;
                branch.push(pre[j]);
            }
        }
    }
    debug_assert_eq!(lifts.len(), d);
    Ok(lifts)
}

fn chordal_diameter(points: &[SpherePoint]) -> f64 {
    let emb: Vec<[f64; 3]> = points.iter().map(|p| p.embed()).collect();
    let mut best = 0.0f64;
    for i in 0..emb.len() {
        for j in 0..i {
            best = best.max(chord(&emb[i], &emb[j]));
        }
    }
    best
}

/// `C_n` for `n = 1..=depth`: the largest chordal diameter among the
/// components of `f^{-n}(D)`, where `D` is the chordal disk of the given
/// radius. Components are tracked by lifting a boundary sample.
pub fn shrinking_probe(
    map: &RationalMap,
    disk_center: &SpherePoint,
    disk_radius: f64,
    depth: usize,
) -> Result<Vec<f64>, DynamicsError> {
    if !(disk_radius > 0.0 && disk_radius < 2.0) {
        return Err(DynamicsError::BadRadius(disk_radius));
    }
    if depth == 0 {
        return Ok(Vec::new());
    }
    let components = (map.degree() as f64).powi(depth as i32);
    if components > MAX_PROBE_COMPONENTS {
        return Err(DynamicsError::DepthTooLarge { components });
    }
    let mut curves = vec![chordal_circle(disk_center, disk_radius, 256)];
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        let lifted: Result<Vec<Vec<Vec<SpherePoint>>>, RootError> =
            curves.par_iter().map(|c| lift_curve(map, c)).collect();
        curves = lifted?.into_iter().flatten().collect();
        let diam = curves
            .par_iter()
            .map(|c| chordal_diameter(c))
            .reduce(|| 0.0, f64::max);
        out.push(diam);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rotation_detection() {
        assert_eq!(detect_rotation(c(1.0, 0.0)), Some(Rotation { p: 1, q: 1 }));
        assert_eq!(detect_rotation(c(-1.0, 0.0)), Some(Rotation { p: 1, q: 2 }));
        let l = Complex64::from_polar(1.0, 2.0 * PI * 3.0 / 7.0);
        assert_eq!(detect_rotation(l), Some(Rotation { p: 3, q: 7 }));
        let golden = Complex64::from_polar(1.0, PI * (5f64.sqrt() - 1.0));
        assert_eq!(detect_rotation(golden), None);
    }

    #[test]
    fn iterate_polynomials_of_basilica() {
        // (z^2 - 1)^2 - 1 = z^4 - 2z^2
        let f = RationalMap::quadratic(c(-1.0, 0.0));
        let (n, d) = iterate_polynomials(&f, 2);
        assert_eq!(n, vec![c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(d, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn superattracting_origin() {
        let f = RationalMap::quadratic(c(0.0, 0.0));
        let pp = classify(&f, &SpherePoint::ZERO, 1).unwrap();
        assert_eq!(pp.class, PointClass::Superattracting);
        let err = classify(&f, &SpherePoint::real(0.5), 1).unwrap_err();
        assert!(matches!(err, DynamicsError::NotPeriodic { .. }));
    }

    #[test]
    fn chordal_circle_has_requested_radius() {
        let center = SpherePoint::real(3.0);
        for p in chordal_circle(&center, 0.1, 32) {
            assert!((chordal_distance(&p, &center) - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn escape_radius_for_z2_plus_one() {
        assert_eq!(escape_radius(&RationalMap::quadratic(c(1.0, 0.0))), Some(4.0));
    }
}
