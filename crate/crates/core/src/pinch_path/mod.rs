//! A pinching path in the quadratic family: the attracting fixed point of
//! `z² + c` is pushed to the parabolic map `z² + 1/4` by shrinking
//! `log λ` by the factor `1 + t`, with convergence diagnostics per `t`.
//! Read backwards, the same rows approach `g` by hyperbolic maps.

mod hausdorff;
mod julia;

pub use hausdorff::hausdorff;
pub use julia::{coupled_samples, julia_sample, seed_point, BURN_IN};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::dynamics::{classify, DynamicsError};
use crate::poly::RootError;
use crate::rational::RationalMap;
use crate::sphere::{chordal_distance, SpherePoint};

/// Smallest grid and Julia sample sizes accepted by [`PathConfig`].
pub const MIN_POINTS: usize = 100;
/// Final sup distance to the parabolic map required for a pass.
pub const FINAL_SUP_TOL: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("multiplier {0} must satisfy 0 < |λ| < 1")]
    BadMultiplier(Complex64),
    #[error("bad path configuration: {0}")]
    BadConfig(String),
    #[error("map has no repelling or parabolic finite fixed point to seed backward orbits")]
    NoRepellingSeedPoint,
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    RootFinding(#[from] RootError),
}

/// `λ(t) = exp(log λ₀ / (1 + t))` with the principal logarithm.
pub fn multiplier_schedule(lambda0: Complex64, t: f64) -> Result<Complex64, PathError> {
    let m = lambda0.norm();
    if !(m > 0.0 && m < 1.0) {
        return Err(PathError::BadMultiplier(lambda0));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(PathError::BadConfig(format!("time must be finite and >= 0, got {t}")));
    }
    Ok((lambda0.ln() / (1.0 + t)).exp())
}

/// `c = λ/2 - λ²/4`: the fixed point `λ/2` of `z² + c` has multiplier `λ`.
pub fn quadratic_parameter(lambda: Complex64) -> Complex64 {
    lambda / 2.0 - lambda * lambda / 4.0
}

pub fn quadratic_from_multiplier(lambda: Complex64) -> RationalMap {
    RationalMap::quadratic(quadratic_parameter(lambda))
}

/// The parabolic endpoint `z² + 1/4`.
pub fn parabolic_target() -> RationalMap {
    RationalMap::quadratic(Complex64::new(0.25, 0.0))
}

/// `n` points of the Fibonacci lattice on the unit sphere, as sphere points.
pub fn fibonacci_sphere(n: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            SpherePoint::from_embedding([rho * phi.cos(), rho * phi.sin(), z])
        })
        .collect()
}

/// `max chordal(f(z), g(z))` over an `n`-point Fibonacci lattice.
pub fn sup_distance(f: &RationalMap, g: &RationalMap, n: usize) -> f64 {
    fibonacci_sphere(n)
        .iter()
        .map(|z| chordal_distance(&f.eval(z), &g.eval(z)))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub lambda0: Complex64,
    pub t_schedule: Vec<f64>,
    pub grid_points: usize,
    pub julia_points: usize,
    pub seed: u64,
}

impl PathConfig {
    /// Evenly spaced schedule `t = 0, tmax/steps, ..., tmax`.
    pub fn evenly_spaced(lambda0: Complex64, tmax: f64, steps: usize, grid_points: usize, julia_points: usize, seed: u64) -> Self {
        let t_schedule = (0..=steps).map(|k| tmax * k as f64 / steps.max(1) as f64).collect();
        PathConfig { lambda0, t_schedule, grid_points, julia_points, seed }
    }

    /// `λ₀ = 1/4`, `t = 0, 1, ..., 50`, `10⁴` grid and Julia points.
    pub fn default_run() -> Self {
        Self::evenly_spaced(Complex64::new(0.25, 0.0), 50.0, 50, 10_000, 10_000, 0)
    }

    pub fn validate(&self) -> Result<(), PathError> {
        let m = self.lambda0.norm();
        if !(m > 0.0 && m < 1.0) {
            return Err(PathError::BadMultiplier(self.lambda0));
        }
        let ts = &self.t_schedule;
        if ts.first() != Some(&0.0) {
            return Err(PathError::BadConfig("schedule must start at t = 0".into()));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) || ts.iter().any(|t| !t.is_finite()) {
            return Err(PathError::BadConfig("schedule must be finite and strictly increasing".into()));
        }
        if self.grid_points < MIN_POINTS || self.julia_points < MIN_POINTS {
            return Err(PathError::BadConfig(format!("grid and julia counts must be >= {MIN_POINTS}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub t: f64,
    pub lambda: Complex64,
    pub c: Complex64,
    pub sup_dist_to_g: f64,
    /// `2|c - 1/4|`, an upper bound for `sup_dist_to_g`.
    pub sup_bound: f64,
    pub julia_hausdorff_to_g: f64,
    /// Chordal distance from the attracting fixed point `λ/2` to `1/2`.
    pub attracting_point_gap: f64,
    /// `classify` confirms `λ/2` is an attracting fixed point.
    pub certified_attracting: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathVerdicts {
    pub sup_tail_decreasing: bool,
    pub julia_tail_decreasing: bool,
    pub gap_tail_decreasing: bool,
    pub final_sup_small: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub rows: Vec<PathRow>,
    pub verdicts: PathVerdicts,
}

/// Non-increasing over the second half of the rows.
fn tail_decreasing(values: &[f64]) -> bool {
    values[values.len() / 2..].windows(2).all(|w| w[1] <= w[0])
}

impl PathReport {
    /// The rows in decreasing `t`: maps approaching `g` read as a plumbing
    /// path leaving it.
    pub fn plumbing_view(&self) -> Vec<PathRow> {
        self.rows.iter().rev().cloned().collect()
    }

    /// In the plumbing view the sup distance grows from its smallest value.
    pub fn plumbing_moves_away(&self) -> bool {
        let view = self.plumbing_view();
        let sup: Vec<f64> = view.iter().map(|r| r.sup_dist_to_g).collect();
        sup[..sup.len() - sup.len() / 2].windows(2).all(|w| w[1] >= w[0])
    }

    fn assess(rows: &[PathRow]) -> PathVerdicts {
        let col = |f: fn(&PathRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        let sup_tail_decreasing = tail_decreasing(&col(|r| r.sup_dist_to_g));
        let julia_tail_decreasing = tail_decreasing(&col(|r| r.julia_hausdorff_to_g));
        let gap_tail_decreasing = tail_decreasing(&col(|r| r.attracting_point_gap));
        let final_sup_small = rows.last().is_some_and(|r| r.sup_dist_to_g < FINAL_SUP_TOL);
        PathVerdicts {
            sup_tail_decreasing,
            julia_tail_decreasing,
            gap_tail_decreasing,
            final_sup_small,
            pass: sup_tail_decreasing && julia_tail_decreasing && gap_tail_decreasing && final_sup_small,
        }
    }
}


fn run_row(config: &PathConfig, g: &RationalMap, index: usize) -> Result<PathRow, PathError> {
    let t = config.t_schedule[index];
    let lambda = multiplier_schedule(config.lambda0, t)?;
    let c = quadratic_parameter(lambda);
    let f = RationalMap::quadratic(c);
    let fixed = SpherePoint::finite(lambda / 2.0);
    let certified_attracting = classify(&f, &fixed, 1)?.class.is_attracting();
    // every row replays the same stream, so the samples of g are identical
    // across rows and only the follower cloud moves with t
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (cloud_g, cloud_f) = coupled_samples(g, &f, config.julia_points, &mut rng)?;
    Ok(PathRow {
        t,
        lambda,
        c,
        sup_dist_to_g: sup_distance(&f, g, config.grid_points),
        sup_bound: 2.0 * (c - 0.25).norm(),
        julia_hausdorff_to_g: hausdorff(&cloud_f, &cloud_g)?,
        attracting_point_gap: chordal_distance(&fixed, &SpherePoint::real(0.5)),
        certified_attracting,
    })
}

/// Run the pinching path. Rows are independent and computed in parallel.
pub fn run_path(config: &PathConfig) -> Result<PathReport, PathError> {
    config.validate()?;
    let g = parabolic_target();
    let rows = (0..config.t_schedule.len())
        .into_par_iter()
        .map(|i| run_row(config, &g, i))
        .collect::<Result<Vec<_>, _>>()?;
    let verdicts = PathReport::assess(&rows);
    Ok(PathReport { rows, verdicts })
}
