//! Rational maps of the Riemann sphere and Möbius transformations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{self, RootError};
use crate::series::Series;
use crate::sphere::{Chart, SpherePoint};

/// Maps of higher degree are rejected.
pub const MAX_DEGREE: usize = 64;

/// Coprimality threshold on the normalized resultant.
pub const RESULTANT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("map is constant")]
    Constant,
    #[error("degree {0} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("numerator and denominator share a root (|resultant| = {0:e})")]
    CommonRoot(f64),
    #[error("operation needs degree at least 2")]
    DegreeTooSmall,
    #[error(transparent)]
    RootFinding(#[from] RootError),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("finite-chart derivative requested at a pole or at infinity")]
pub struct ChartError;

/// A rational map `N(z)/D(z)` with coprime numerator and denominator.
///
/// Coefficients are stored in ascending order and normalized so that the
/// leading coefficient of the higher-degree polynomial (the larger one when the
/// degrees agree) is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRecord", into = "MapRecord")]
pub struct RationalMap {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
}

/// JSON shape `{"num": [[re, im], ...], "den": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct MapRecord {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
}

impl TryFrom<MapRecord> for RationalMap {
    type Error = MapError;
    fn try_from(r: MapRecord) -> Result<Self, MapError> {
        let conv = |v: Vec<[f64; 2]>| v.into_iter().map(|[a, b]| Complex64::new(a, b)).collect();
        RationalMap::new(conv(r.num), conv(r.den))
    }
}

impl From<RationalMap> for MapRecord {
    fn from(m: RationalMap) -> Self {
        let conv = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect();
        MapRecord {
            num: conv(&m.num),
            den: conv(&m.den),
        }
    }
}

impl RationalMap {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self, MapError> {
        let num = poly::trim(num);
        let den = poly::trim(den);
        if den.is_empty() {
            return Err(MapError::ZeroDenominator);
        }
        if num.is_empty() {
            return Err(MapError::Constant);
        }
        let d = (num.len() - 1).max(den.len() - 1);
        if d == 0 {
            return Err(MapError::Constant);
        }
        if d > MAX_DEGREE {
            return Err(MapError::DegreeTooLarge(d));
        }
        let map = Self::normalized(num, den);
        let res = poly::resultant(&map.num, &map.den).norm();
        if !(res > RESULTANT_TOL) {
            return Err(MapError::CommonRoot(res));
        }
        Ok(map)
    }

    /// Normalize without the coprimality check (inputs known to be coprime).
    fn normalized(num: Vec<Complex64>, den: Vec<Complex64>) -> Self {
        let num = poly::trim(num);
        let den = poly::trim(den);
        let (ln, ld) = (*num.last().unwrap(), *den.last().unwrap());
        let lead = match num.len().cmp(&den.len()) {
            std::cmp::Ordering::Greater => ln,
            std::cmp::Ordering::Less => ld,
            std::cmp::Ordering::Equal => {
                if ln.norm() >= ld.norm() {
                    ln
                } else {
                    ld
                }
            }
        };
        RationalMap {
            num: num.iter().map(|c| c / lead).collect(),
            den: den.iter().map(|c| c / lead).collect(),
        }
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self, MapError> {
        Self::new(coeffs, vec![ONE])
    }

    /// `z^2 + c`.
    pub fn quadratic(c: Complex64) -> Self {
        Self::normalized(vec![c, ZERO, ONE], vec![ONE])
    }

    pub fn identity() -> Self {
        Self::normalized(vec![ZERO, ONE], vec![ONE])
    }

    /// Parse coefficient lists given as real pairs.
    pub fn from_pairs(num: &[[f64; 2]], den: &[[f64; 2]]) -> Result<Self, MapError> {
        let conv = |v: &[[f64; 2]]| v.iter().map(|&[a, b]| Complex64::new(a, b)).collect();
        Self::new(conv(num), conv(den))
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.num
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.den
    }

    pub fn degree(&self) -> usize {
        (self.num.len() - 1).max(self.den.len() - 1)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    /// Homogeneous value `(N, D)` at a point, as a projective pair.
    fn projective(&self, z: &SpherePoint) -> (Complex64, Complex64) {
        match z.chart() {
            Chart::Finite if z.value().norm() <= 1.0 => {
                (poly::eval(&self.num, z.value()), poly::eval(&self.den, z.value()))
            }
            _ => {
                let w = z.coordinate(Chart::Infinity);
                let d = self.degree();
                let n = self.num.len() - 1;
                let m = self.den.len() - 1;
                // w^d N(1/w) and w^d D(1/w) evaluated from the reversed polynomials
                let a = eval_reversed(&self.num, w) * w.powu((d - n) as u32);
                let b = eval_reversed(&self.den, w) * w.powu((d - m) as u32);
                (a, b)
            }
        }
    }

    pub fn eval(&self, z: &SpherePoint) -> SpherePoint {
        let (a, b) = self.projective(z);
        SpherePoint::from_ratio(a, b)
    }

    /// Plain complex evaluation, returning a non-finite value at poles.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let p = self.eval(&SpherePoint::finite(z));
        match p.to_finite() {
            Some(v) => v,
            None => Complex64::new(f64::INFINITY, 0.0),
        }
    }

    pub fn iterate(&self, n: usize, z: &SpherePoint) -> SpherePoint {
        let mut p = *z;
        for _ in 0..n {
            p = self.eval(&p);
        }
        p
    }

    /// `f'(z)` in the finite charts of source and image.
    pub fn derivative(&self, z: &SpherePoint) -> Result<Complex64, ChartError> {
        let z = z.to_finite().ok_or(ChartError)?;
        self.derivative_at(z)
    }

    fn derivative_at(&self, z: Complex64) -> Result<Complex64, ChartError> {
        let (n, dn) = poly::eval_with_derivative(&self.num, z);
        let (d, dd) = poly::eval_with_derivative(&self.den, z);
        if d == ZERO {
            return Err(ChartError);
        }
        let v = (dn * d - n * dd) / (d * d);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ChartError)
        }
    }

    /// The map written in the given source and target charts.
    pub fn in_charts(&self, source: Chart, target: Chart) -> RationalMap {
        let d = self.degree();
        let (mut num, mut den) = (self.num.clone(), self.den.clone());
        if source == Chart::Infinity {
            let n = num.len() - 1;
            let m = den.len() - 1;
            let mut a = vec![ZERO; d - n];
            a.extend(poly::reversed(&num));
            let mut b = vec![ZERO; d - m];
            b.extend(poly::reversed(&den));
            num = a;
            den = b;
        }
        if target == Chart::Infinity {
            std::mem::swap(&mut num, &mut den);
        }
        Self::normalized(num, den)
    }

    /// Derivative of `f` at `z`, using the chart of `z` for the source and
    /// `target` for the image.
    pub fn derivative_in_charts(&self, z: &SpherePoint, target: Chart) -> Result<Complex64, ChartError> {
        let local = self.in_charts(z.chart(), target);
        local.derivative_at(z.value())
    }

    /// Taylor series of `f` around `z` in chart coordinates: the source uses
    /// the chart of `z`, the image uses `target`. The constant term is the
    /// image coordinate.
    pub fn local_series(&self, z: &SpherePoint, target: Chart, order: usize) -> Series {
        let local = self.in_charts(z.chart(), target);
        let u = z.value();
        let n = Series::new(poly::taylor_shift(&local.num, u), order);
        let d = Series::new(poly::taylor_shift(&local.den, u), order);
        n.div(&d)
    }

    /// The Wronskian `N'D - ND'` whose roots are the finite critical points.
    pub fn wronskian(&self) -> Vec<Complex64> {
        let a = poly::mul(&poly::derivative(&self.num), &self.den);
        let b = poly::mul(&self.num, &poly::derivative(&self.den));
        poly::sub(&a, &b)
    }

    /// All `2d - 2` critical points with multiplicity.
    pub fn critical_points(&self) -> Result<Vec<SpherePoint>, MapError> {
        let d = self.degree();
        if d < 2 {
            return Err(MapError::DegreeTooSmall);
        }
        let w = poly::trim_relative(self.wronskian(), 1e-13);
        let finite = poly::roots(&w)?;
        let mut out: Vec<SpherePoint> = finite.into_iter().map(SpherePoint::finite).collect();
        let missing = (2 * d - 2).saturating_sub(out.len());
        out.extend(std::iter::repeat_n(SpherePoint::INFINITY, missing));
        Ok(out)
    }

    /// All `d` preimages of `z` with multiplicity, solving `b N(w) - a D(w) = 0`
    /// for `z = a/b`.
    pub fn preimages(&self, z: &SpherePoint) -> Result<Vec<SpherePoint>, RootError> {
        let (a, b) = match z.chart() {
            Chart::Finite => (z.value(), ONE),
            Chart::Infinity => (ONE, z.value()),
        };
        let eq = poly::sub(&poly::scale(&self.num, b), &poly::scale(&self.den, a));
        let eq = poly::trim_relative(eq, 1e-14);
        let roots = if eq.len() > 1 { poly::roots(&eq)? } else { Vec::new() };
        let mut out: Vec<SpherePoint> = roots.into_iter().map(SpherePoint::finite).collect();
        let missing = self.degree().saturating_sub(out.len());
        out.extend(std::iter::repeat_n(SpherePoint::INFINITY, missing));
        Ok(out)
    }

    /// `post ∘ self ∘ pre`.
    pub fn conjugate_by(&self, post: &Mobius, pre: &Mobius) -> Result<RationalMap, MapError> {
        let d = self.degree();
        // substitute z = (a w + b)/(c w + e) and clear (c w + e)^d
        let top = [pre.b, pre.a];
        let bot = [pre.d, pre.c];
        let subst = |p: &[Complex64]| {
            let mut acc = vec![ZERO];
            for (k, coef) in p.iter().enumerate() {
                let mut term = vec![*coef];
                for _ in 0..k {
                    term = poly::mul(&term, &top);
                }
                for _ in k..d {
                    term = poly::mul(&term, &bot);
                }
                acc = poly::add(&acc, &term);
            }
            acc
        };
        let n1 = subst(&self.num);
        let d1 = subst(&self.den);
        let num = poly::add(&poly::scale(&n1, post.a), &poly::scale(&d1, post.b));
        let den = poly::add(&poly::scale(&n1, post.c), &poly::scale(&d1, post.d));
        // cancellation can leave rounding-level leading terms
        let num = poly::trim_relative(num, 1e-15);
        let den = poly::trim_relative(den, 1e-15);
        RationalMap::new(num, den)
    }

    /// `m ∘ self ∘ m^{-1}`.
    pub fn conjugate(&self, m: &Mobius) -> Result<RationalMap, MapError> {
        self.conjugate_by(m, &m.inverse())
    }
}

fn eval_reversed(p: &[Complex64], w: Complex64) -> Complex64 {
    // sum a_k w^{n-k}
    p.iter().fold(ZERO, |acc, &c| acc * w + c)
}

/// A Möbius transformation `(a z + b)/(c z + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    /// Returns `None` when `ad - bc` vanishes.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Option<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        Mobius { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    pub fn inversion() -> Self {
        Mobius { a: ZERO, b: ONE, c: ONE, d: ZERO }
    }

    pub fn affine(a: Complex64, b: Complex64) -> Option<Self> {
        Self::new(a, b, ZERO, ONE)
    }

    pub fn apply(&self, z: &SpherePoint) -> SpherePoint {
        match z.chart() {
            Chart::Finite => {
                let v = z.value();
                SpherePoint::from_ratio(self.a * v + self.b, self.c * v + self.d)
            }
            Chart::Infinity => {
                let w = z.value();
                SpherePoint::from_ratio(self.a + self.b * w, self.c + self.d * w)
            }
        }
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn inverse(&self) -> Self {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Self {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        (self.a * self.d - self.b * self.c) / (den * den)
    }

    pub fn to_map(&self) -> RationalMap {
        RationalMap::normalized(vec![self.b, self.a], vec![self.d, self.c])
    }
}
