//! Numerical toolkit for pinching and plumbing deformations of geometrically
//! finite rational maps.
//!
//! The crate is organised bottom-up:
//!
//! * [`sphere`], [`poly`], [`rational`] and [`series`]: arithmetic on the
//!   Riemann sphere, polynomials and rational maps.
//! * [`dynamics`] and [`parabolic`]: periodic points, classification,
//!   critical orbits, petals and Fatou coordinates.
//! * [`moduli`]: conformal modulus of annuli and quadrilaterals (closed forms
//!   and a discrete harmonic-potential estimator).
//! * [`pinch_model`], [`multicurve`], [`pinch_path`], [`distortion`]: the
//!   pinching model, transition matrices of multicurves, the pinching path in
//!   the quadratic family and modulus distortion functionals.
//! * [`render`]: raster output.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distortion;
pub mod dynamics;
pub mod formats;
pub mod moduli;
pub mod multicurve;
pub mod parabolic;
pub mod pinch_model;
pub mod pinch_path;
pub mod poly;
pub mod rational;
pub mod render;
pub mod series;
pub mod sphere;

pub use num_complex::Complex64;
pub use rational::{Mobius, RationalMap};
pub use sphere::{chordal_distance, Chart, SpherePoint};
