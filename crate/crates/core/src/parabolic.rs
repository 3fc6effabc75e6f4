//! Attracting petals and Fatou coordinates at a parabolic fixed point with
//! multiplier 1 and a single petal (`f(z) = z + c(z-y)^2 + ...`, `c != 0`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::dynamics::{PeriodicPoint, PointClass, Rotation};
use crate::rational::RationalMap;
use crate::sphere::{Chart, SpherePoint};

/// Number of boundary points used to verify petal invariance.
pub const PETAL_SAMPLES: usize = 256;
/// Orbits of boundary samples must satisfy `|c (f^n(s) - y)| < 2/n` here.
const CONVERGENCE_STEPS: usize = 1000;
/// Cauchy increment at which the Fatou coordinate is accepted.
pub const FATOU_INCREMENT_TOL: f64 = 1e-9;
/// Default iteration budget for [`fatou_coordinate`].
pub const DEFAULT_TERMS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParabolicError {
    #[error("point is not a parabolic fixed point with rotation 1/1 and multiplicity 2")]
    NotParabolic,
    #[error("petal scale must lie in (0, 1], got {0}")]
    BadScale(f64),
    #[error("petal is not forward invariant at this scale (worst relative overshoot {overshoot:e}); shrink the scale")]
    InvarianceFailure { overshoot: f64 },
    #[error("boundary orbit did not converge to the parabolic point")]
    NoConvergence,
    #[error("point lies outside the petal")]
    OutsidePetal,
    #[error("Fatou coordinate did not settle within {terms} iterations (last increment {increment:e})")]
    SlowConvergence { terms: usize, increment: f64 },
}

/// A tangent-disk petal `{z : |c(z - y) + σ/2| < σ/2}` at the parabolic
/// point `y`, together with the local Taylor data `f(y + h) = y + h + c h^2 +
/// a h^3 + e h^4 + ...`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Petal {
    pub base_point: SpherePoint,
    /// Unit vector pointing from `y` into the petal.
    pub direction: Complex64,
    pub scale: f64,
    pub sample: Vec<SpherePoint>,
    pub quadratic: Complex64,
    pub cubic: Complex64,
    pub quartic: Complex64,
}

impl Petal {
    fn y(&self) -> Complex64 {
        self.base_point.value()
    }

    pub fn center(&self) -> Complex64 {
        self.y() - self.scale / (2.0 * self.quadratic)
    }

    pub fn radius(&self) -> f64 {
        self.scale / (2.0 * self.quadratic.norm())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center()).norm() < self.radius()
    }

    /// Point of the petal with local coordinate `U = -1/(c (z - y))`; the
    /// petal is the half-plane `Re U > 1/σ`.
    pub fn point_from_u(&self, u: Complex64) -> Complex64 {
        self.y() - 1.0 / (self.quadratic * u)
    }

    fn u_of(&self, z: Complex64) -> Complex64 {
        -1.0 / (self.quadratic * (z - self.y()))
    }

    /// `U - β log U + K/U`, the asymptotic expansion of the Fatou coordinate.
    fn asymptotic(&self, u: Complex64) -> Complex64 {
        let c = self.quadratic;
        let a_rel = self.cubic / (c * c);
        let e_rel = self.quartic / (c * c * c);
        let beta = 1.0 - a_rel;
        let gamma = 1.0 - 2.0 * a_rel + e_rel;
        let k = gamma - beta * beta + beta / 2.0;
        u - beta * u.ln() + k / u
    }
}

/// Build the petal of the given scale `σ ∈ (0, 1]` and verify forward
/// invariance and convergence on [`PETAL_SAMPLES`] boundary points.
pub fn build_petal(map: &RationalMap, pp: &PeriodicPoint, scale: f64) -> Result<Petal, ParabolicError> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(ParabolicError::BadScale(scale));
    }
    if pp.class != PointClass::Parabolic
        || pp.period != 1
        || pp.rotation != Some(Rotation { p: 1, q: 1 })
        || pp.multiplicity != Some(2)
    {
        return Err(ParabolicError::NotParabolic);
    }
    let y = pp.location.to_finite().ok_or(ParabolicError::NotParabolic)?;
    let base = SpherePoint::finite(y);
    if base.chart() != Chart::Finite {
        return Err(ParabolicError::NotParabolic);
    }
    let series = map.local_series(&base, Chart::Finite, 4);
    if (series.coeff(1) - 1.0).norm() > 1e-6 || series.coeff(2).norm() < 1e-10 {
        return Err(ParabolicError::NotParabolic);
    }
    let c = series.coeff(2);
    let mut petal = Petal {
        base_point: base,
        direction: -c.conj() / c.norm(),
        scale,
        sample: Vec::new(),
        quadratic: c,
        cubic: series.coeff(3),
        quartic: series.coeff(4),
    };
    let (center, radius) = (petal.center(), petal.radius());
    let toward_y = (y - center) / radius;
    petal.sample = (0..PETAL_SAMPLES)
        .map(|k| {
            let theta = 2.0 * PI * (k as f64 + 0.5) / PETAL_SAMPLES as f64;
            SpherePoint::finite(center + radius * toward_y * Complex64::from_polar(1.0, theta))
        })
        .collect();

    let mut overshoot = 0.0f64;
    for s in &petal.sample {
        let img = map.eval(s).to_finite().ok_or(ParabolicError::InvarianceFailure { overshoot: f64::INFINITY })?;
        let inside = (img - center).norm() < radius * (1.0 + 1e-12);
        if !inside && (img - y).norm() >= 1e-8 {
            overshoot = overshoot.max((img - center).norm() / radius - 1.0);
        }
    }
    if overshoot > 0.0 {
        return Err(ParabolicError::InvarianceFailure { overshoot });
    }
    for s in &petal.sample {
        let mut z = s.value();
        for _ in 0..CONVERGENCE_STEPS {
            z = map.eval_complex(z);
        }
        let n = CONVERGENCE_STEPS as f64;
        if !((c * (z - y)).norm() * n < 2.0) {
            return Err(ParabolicError::NoConvergence);
        }
    }
    Ok(petal)
}

/// Attracting Fatou coordinate `Φ(z) = lim (U_n - β log U_n + K/U_n - n)` with
/// `U_n = -1/(c (f^n(z) - y))`, so that `Φ(f(z)) = Φ(z) + 1`.
///
/// Iteration stops once consecutive terms differ by less than
/// [`FATOU_INCREMENT_TOL`].
pub fn fatou_coordinate(
    map: &RationalMap,
    petal: &Petal,
    z: &SpherePoint,
    n_terms: usize,
) -> Result<Complex64, ParabolicError> {
    let z = z.to_finite().ok_or(ParabolicError::OutsidePetal)?;
    if !petal.contains(z) {
        return Err(ParabolicError::OutsidePetal);
    }
    let mut w = z;
    let mut prev = petal.asymptotic(petal.u_of(w));
    let mut increment = f64::INFINITY;
    for n in 1..=n_terms {
        w = map.eval_complex(w);
        let phi = petal.asymptotic(petal.u_of(w)) - n as f64;
        increment = (phi - prev).norm();
        if increment < FATOU_INCREMENT_TOL {
            return Ok(phi);
        }
        prev = phi;
    }
    Err(ParabolicError::SlowConvergence { terms: n_terms, increment })
}

/// Sample points of the petal on a grid in the coordinate `U`:
/// `U = 1/σ + x + iy` with `x ∈ [0.5, 4.5]`, `y ∈ [-4, 4]`.
pub fn petal_samples(petal: &Petal, count: usize) -> Vec<Complex64> {
    let side = (count as f64).sqrt().ceil() as usize;
    let mut out = Vec::with_capacity(count);
    'outer: for i in 0..side {
        for j in 0..side {
            if out.len() == count {
                break 'outer;
            }
            let x = 0.5 + 4.0 * i as f64 / (side.max(2) - 1) as f64;
            let y = -4.0 + 8.0 * j as f64 / (side.max(2) - 1) as f64;
            out.push(petal.point_from_u(Complex64::new(1.0 / petal.scale + x, y)));
        }
    }
    out
}

/// `max |Φ(f(z)) - Φ(z) - 1|` over `sample_count` points of the petal.
pub fn abel_residual(map: &RationalMap, petal: &Petal, sample_count: usize) -> Result<f64, ParabolicError> {
    let mut worst = 0.0f64;
    for z in petal_samples(petal, sample_count.max(1)) {
        let p = SpherePoint::finite(z);
        let phi = fatou_coordinate(map, petal, &p, DEFAULT_TERMS)?;
        let phi_next = fatou_coordinate(map, petal, &map.eval(&p), DEFAULT_TERMS)?;
        worst = worst.max((phi_next - phi - 1.0).norm());
    }
    Ok(worst)
}
