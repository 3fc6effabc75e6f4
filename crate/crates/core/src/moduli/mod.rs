//! Conformal modulus of annuli and quadrilaterals.
//!
//! Conventions: the modulus of the round annulus `{r_in < |z| < r_out}` is
//! `log(r_out/r_in) / (2π)`, and the modulus of a quadrilateral conformally
//! equivalent to a rectangle of width `a` (between its insulated sides) and
//! height `b` (between its distinguished sides) is `b/a`. Both are computed
//! numerically as `1/E`, where `E` is the Dirichlet energy of the harmonic
//! function equal to 0 on one boundary piece and 1 on the other.

mod grid;
mod lemmas;
mod region;

use thiserror::Error;

pub use grid::{solve, Domain, Raster, RasterChart, Solution};
pub use lemmas::{
    extract_round_annulus, extract_round_annulus_report, quad_modulus, verify_quad_annulus_inequality,
    verify_three_quadrilateral_inequality, QuadAnnulusReport, QuadEstimate, QuadRegion, RoundExtractionReport,
    ThreeQuadConfig, ThreeQuadReport, LEMMA_SLACK,
};
pub use region::{annulus_raster, grid_modulus, grid_modulus_about, grid_modulus_on, AnnulusKind, AnnulusRegion, Boundary, GridEstimate};

/// Relative tolerance used when checking `lower <= estimate <= upper`.
pub const SANDWICH_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulusError {
    #[error("radii must satisfy 0 < r_in < r_out (got {0}, {1})")]
    BadRadii(f64, f64),
    #[error("disks touch or overlap (kappa = {0})")]
    DisksTouch(f64),
    #[error("invalid region: {0}")]
    BadRegion(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("linear solver did not converge ({iterations} iterations, relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("no round annulus: inner radius {r1} >= outer radius {r2}")]
    NoRoundAnnulus { r1: f64, r2: f64 },
    #[error("center is not inside the inner boundary")]
    BadCenter,
    #[error("quadrilaterals do not decompose the annulus: {0}")]
    BadDecomposition(String),
    #[error("bad quadrilateral configuration: {0}")]
    BadConfiguration(String),
}

/// `log(r_out / r_in) / (2π)`.
pub fn round_modulus(r_in: f64, r_out: f64) -> Result<f64, ModulusError> {
    if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
        return Err(ModulusError::BadRadii(r_in, r_out));
    }
    Ok((r_out / r_in).ln() / (2.0 * std::f64::consts::PI))
}

/// Modulus of the complement of the disjoint closed disks `D(0, r1)` and
/// `D(1, r2)`: `arccosh(κ) / (2π)` with `κ = (1 - r1² - r2²) / (2 r1 r2)`.
pub fn two_disk_modulus(r1: f64, r2: f64) -> Result<f64, ModulusError> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(ModulusError::BadRadii(r1, r2));
    }
    let kappa = (1.0 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    if kappa <= 1.0 {
        return Err(ModulusError::DisksTouch(kappa));
    }
    Ok(kappa.acosh() / (2.0 * std::f64::consts::PI))
}

/// Modulus of the complement of two disjoint closed disks with arbitrary
/// centers, by normalizing the center distance to 1.
pub fn disk_pair_modulus(
    c1: num_complex::Complex64,
    r1: f64,
    c2: num_complex::Complex64,
    r2: f64,
) -> Result<f64, ModulusError> {
    let d = (c1 - c2).norm();
    if !(d > 0.0) {
        return Err(ModulusError::DisksTouch(f64::NAN));
    }
    two_disk_modulus(r1 / d, r2 / d)
}
