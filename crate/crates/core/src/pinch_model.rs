//! The radial pinching model `w_t` on `A(r) = {1/r < |z| < r}`: a
//! quasiconformal self-map stretching the core of the annulus, conformal on
//! the outer zone `|log|z|| >= log(r)/2`, with image `A(r^{1+t})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::moduli::{grid_modulus, AnnulusRegion, ModulusError};

/// Relative distance to a knot of the profile below which `ϱ'` is undefined.
const KNOT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PinchError {
    #[error("pinching model needs r > 1 and t >= 0 (got r = {r}, t = {t})")]
    BadParameters { r: f64, t: f64 },
    #[error("point outside the model annulus")]
    OutOfDomain,
    #[error("the stretch profile is not differentiable at this radius")]
    AtKnot,
    #[error(transparent)]
    Modulus(#[from] ModulusError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinchingModel {
    r: f64,
    t: f64,
}

impl PinchingModel {
    pub fn new(r: f64, t: f64) -> Result<Self, PinchError> {
        if !(r > 1.0 && r.is_finite() && t >= 0.0 && t.is_finite()) {
            return Err(PinchError::BadParameters { r, t });
        }
        Ok(PinchingModel { r, t })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn log_r(&self) -> f64 {
        self.r.ln()
    }

    /// `r(t) = r^{1/(2 e^{2t})}`, the outer radius of the zone stretched by `e^{2t}`.
    pub fn r_t(&self) -> f64 {
        (self.log_r() / (2.0 * (2.0 * self.t).exp())).exp()
    }

    /// `r' = √r`; the model is conformal for `|log|z|| > log r'`.
    pub fn r_prime(&self) -> f64 {
        self.r.sqrt()
    }

    /// Knots of the profile on the positive axis: `log r(t)` and `log r'`.
    pub fn knots(&self) -> (f64, f64) {
        let l = self.log_r();
        (l / (2.0 * (2.0 * self.t).exp()), 0.5 * l)
    }

    /// `mod A(r) = log(r) / π`.
    pub fn modulus(&self) -> f64 {
        self.log_r() / PI
    }
}

/// The odd stretch profile `ϱ` on `(-log r, log r)`.
pub fn rho_profile(x: f64, model: &PinchingModel) -> Result<f64, PinchError> {
    let l = model.log_r();
    if !(x.abs() < l) {
        return Err(PinchError::OutOfDomain);
    }
    let (k1, k2) = model.knots();
    let a = x.abs();
    let t = model.t;
    let y = if a <= k1 {
        (2.0 * t).exp() * a
    } else if a < k2 {
        0.5 * ((2.0 * a / l).ln() + 1.0 + 2.0 * t) * l
    } else {
        a + t * l
    };
    Ok(y.copysign(x))
}

/// `ϱ'(x)`: `e^{2t}`, `log r / (2|x|)` or 1 on the three zones.
pub fn rho_derivative(x: f64, model: &PinchingModel) -> Result<f64, PinchError> {
    let l = model.log_r();
    if !(x.abs() < l) {
        return Err(PinchError::OutOfDomain);
    }
    let (k1, k2) = model.knots();
    let a = x.abs();
    let near = |k: f64| (a - k).abs() <= KNOT_TOL * l;
    if model.t > 0.0 && (near(k1) || near(k2)) {
        return Err(PinchError::AtKnot);
    }
    Ok(if a <= k1 {
        (2.0 * model.t).exp()
    } else if a < k2 {
        l / (2.0 * a)
    } else {
        1.0
    })
}

/// Inverse of the profile on `(-(1+t) log r, (1+t) log r)`.
pub fn rho_inverse(y: f64, model: &PinchingModel) -> Result<f64, PinchError> {
    let l = model.log_r();
    let t = model.t;
    if !(y.abs() < (1.0 + t) * l) {
        return Err(PinchError::OutOfDomain);
    }
    let b = y.abs();
    let x = if b <= 0.5 * l {
        b * (-2.0 * t).exp()
    } else if b < (0.5 + t) * l {
        0.5 * l * (2.0 * b / l - 1.0 - 2.0 * t).exp()
    } else {
        b - t * l
    };
    Ok(x.copysign(y))
}

/// `w_t(z)`: same argument, `log|w| = ϱ(log|z|)`.
pub fn pinch_map(z: Complex64, model: &PinchingModel) -> Result<Complex64, PinchError> {
    let s = z.norm().ln();
    if !s.is_finite() {
        return Err(PinchError::OutOfDomain);
    }
    let y = rho_profile(s, model)?;
    Ok(z * (y - s).exp())
}

/// Beltrami coefficient `∂_z̄ w_t / ∂_z w_t = (ϱ' - 1)/(ϱ' + 1) · z/z̄`.
pub fn beltrami(z: Complex64, model: &PinchingModel) -> Result<Complex64, PinchError> {
    let s = z.norm().ln();
    if !s.is_finite() {
        return Err(PinchError::OutOfDomain);
    }
    let d = rho_derivative(s, model)?;
    let k = (d - 1.0) / (d + 1.0);
    if k == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(k * z / z.conj())
}

/// The limit `w = lim w_t(rz) / r^{1+t}` on `A(1/r, 1)`.
pub fn limit_map(z: Complex64, r: f64) -> Result<Complex64, PinchError> {
    if !(r > 1.0) {
        return Err(PinchError::BadParameters { r, t: f64::INFINITY });
    }
    let m = z.norm();
    if !(m > 1.0 / r && m < 1.0) {
        return Err(PinchError::OutOfDomain);
    }
    if m >= (1.0 / r).sqrt() {
        return Ok(z);
    }
    let l = r.ln();
    let log_w = -0.5 * (1.0 + (l / (2.0 * (r * m).ln())).ln()) * l;
    Ok(z * (log_w - m.ln()).exp())
}

/// `w_t(rz) / r^{1+t}` on `A(1/r, 1)`.
pub fn normalized_map(z: Complex64, model: &PinchingModel) -> Result<Complex64, PinchError> {
    let w = pinch_map(model.r * z, model)?;
    Ok(w * (-(1.0 + model.t) * model.log_r()).exp())
}

/// `sup |w_t(rz)/r^{1+t} - w(z)|` over `n` points of `A(1/r, 1)`, equally
/// spaced in `log|z|` with golden-angle arguments.
pub fn limit_sup_error(model: &PinchingModel, n: usize) -> Result<f64, PinchError> {
    let l = model.log_r();
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut worst = 0.0f64;
    for k in 0..n {
        let s = -l * (k as f64 + 0.5) / n as f64;
        let z = Complex64::from_polar(s.exp(), golden * k as f64);
        worst = worst.max((normalized_map(z, model)? - limit_map(z, model.r)?).norm());
    }
    Ok(worst)
}

/// Image under `w_t` of the round annulus `e^{s_in} < |z| < e^{s_out}`
/// (a sub-annulus of `A(r)`), as a sampled region with `samples` points per
/// boundary circle.
pub fn image_region(model: &PinchingModel, s_in: f64, s_out: f64, samples: usize) -> Result<AnnulusRegion, PinchError> {
    let l = model.log_r();
    if !(-l <= s_in && s_in < s_out && s_out <= l) {
        return Err(PinchError::OutOfDomain);
    }
    // the model annulus is open: pull boundary circles on |log|z|| = log r inward
    let inset = |s: f64| s.clamp(-l * (1.0 - 1e-12), l * (1.0 - 1e-12));
    let circle = |s: f64| -> Result<Vec<Complex64>, PinchError> {
        (0..samples)
            .map(|k| pinch_map(Complex64::from_polar(inset(s).exp(), 2.0 * PI * k as f64 / samples as f64), model))
            .collect()
    };
    Ok(AnnulusRegion::sampled(circle(s_in)?, circle(s_out)?)?)
}

/// One row of the modulus-law table. `t0 = None` is the whole annulus
/// (predicted `(1+t) log r / π`); otherwise the outer component of
/// `A(r)` minus `closure A(r(t0))` (predicted `(2t0+1)/4 · mod A(r)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusLawRow {
    pub t: f64,
    pub t0: Option<f64>,
    pub measured: f64,
    pub closed_form: f64,
    pub predicted: f64,
}

pub fn modulus_law_row(
    r: f64,
    t: f64,
    t0: Option<f64>,
    samples: usize,
    resolution: usize,
) -> Result<ModulusLawRow, PinchError> {
    let model = PinchingModel::new(r, t)?;
    let l = model.log_r();
    let (s_in, predicted) = match t0 {
        None => (-l, (1.0 + t) * l / PI),
        Some(t0) => {
            if !(t0 >= 0.0 && t0 <= t) {
                return Err(PinchError::BadParameters { r, t: t0 });
            }
            let r_t0 = PinchingModel::new(r, t0)?.r_t();
            (r_t0.ln(), (2.0 * t0 + 1.0) / 4.0 * model.modulus())
        }
    };
    // the image of a round annulus is round: its radii give the exact modulus
    let inner = if s_in <= -l { -(1.0 + t) * l } else { rho_profile(s_in, &model)? };
    let closed_form = ((1.0 + t) * l - inner) / (2.0 * PI);
    let region = image_region(&model, s_in, l, samples)?;
    let measured = grid_modulus(&region, resolution)?.estimate;
    Ok(ModulusLawRow { t, t0, measured, closed_form, predicted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_is_continuous_at_knots() {
        for t in [0.0, 0.3, 1.0, 4.0] {
            let m = PinchingModel::new(3.0, t).unwrap();
            let (k1, k2) = m.knots();
            for k in [k1, k2] {
                let a = rho_profile(k * (1.0 - 1e-13), &m).unwrap();
                let b = rho_profile(k * (1.0 + 1e-13), &m).unwrap();
                assert!((a - b).abs() < 1e-12, "t = {t}");
            }
            assert!((rho_profile(k2, &m).unwrap() - (0.5 + t) * m.log_r()).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = PinchingModel::new(5.0, 1.5).unwrap();
        for k in -99..100 {
            let x = m.log_r() * k as f64 / 100.0;
            let y = rho_profile(x, &m).unwrap();
            assert!((rho_inverse(y, &m).unwrap() - x).abs() < 1e-12);
        }
        assert_eq!(rho_profile(m.log_r(), &m), Err(PinchError::OutOfDomain));
    }

    #[test]
    fn parameters_are_checked() {
        assert!(PinchingModel::new(1.0, 0.0).is_err());
        assert!(PinchingModel::new(2.0, -0.1).is_err());
        let m = PinchingModel::new(4.0, 0.5).unwrap();
        assert!(1.0 < m.r_t() && m.r_t() <= m.r_prime() && m.r_prime() < m.r());
    }
}
