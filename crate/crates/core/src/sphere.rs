//! Points of the Riemann sphere and the chordal metric.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Above this modulus a point is stored in the chart at infinity.
pub const CHART_CROSSOVER: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    /// `value` is the coordinate `z`.
    Finite,
    /// `value` is the coordinate `w = 1/z`, with `|w| <= 1`.
    Infinity,
}

/// A point of the Riemann sphere stored in one of the two standard charts.
///
/// Equality is chordal equality: two representations of the same point
/// compare equal.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpherePoint {
    value: Complex64,
    chart: Chart,
}

impl SpherePoint {
    pub const INFINITY: SpherePoint = SpherePoint {
        value: Complex64::new(0.0, 0.0),
        chart: Chart::Infinity,
    };

    pub const ZERO: SpherePoint = SpherePoint {
        value: Complex64::new(0.0, 0.0),
        chart: Chart::Finite,
    };

    /// The point `z`, re-charted when `|z|` exceeds the crossover.
    pub fn finite(z: Complex64) -> Self {
        if z.norm() > CHART_CROSSOVER || !z.is_finite() {
            if !z.is_finite() {
                return Self::INFINITY;
            }
            SpherePoint {
                value: z.inv(),
                chart: Chart::Infinity,
            }
        } else {
            SpherePoint {
                value: z,
                chart: Chart::Finite,
            }
        }
    }

    pub fn real(x: f64) -> Self {
        Self::finite(Complex64::new(x, 0.0))
    }

    /// The point `1/w`.
    pub fn from_reciprocal(w: Complex64) -> Self {
        if w.norm() <= 1.0 {
            SpherePoint {
                value: w,
                chart: Chart::Infinity,
            }
        } else {
            Self::finite(w.inv())
        }
    }

    /// The point `num/den` of projective coordinates. `(0, 0)` yields zero.
    pub fn from_ratio(num: Complex64, den: Complex64) -> Self {
        let (n, d) = (num.norm(), den.norm());
        if n == 0.0 && d == 0.0 {
            return Self::ZERO;
        }
        if n <= CHART_CROSSOVER * d {
            Self::finite(num / den)
        } else {
            SpherePoint {
                value: den / num,
                chart: Chart::Infinity,
            }
        }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn is_infinity(&self) -> bool {
        self.chart == Chart::Infinity && self.value == Complex64::new(0.0, 0.0)
    }

    /// The affine coordinate, or `None` at infinity.
    pub fn to_finite(&self) -> Option<Complex64> {
        match self.chart {
            Chart::Finite => Some(self.value),
            Chart::Infinity if self.value.norm() == 0.0 => None,
            Chart::Infinity => Some(self.value.inv()),
        }
    }

    /// Coordinate of this point in the given chart (may be huge or infinite
    /// when the point is near the excluded pole of that chart).
    pub fn coordinate(&self, chart: Chart) -> Complex64 {
        if chart == self.chart {
            self.value
        } else {
            self.value.inv()
        }
    }

    /// Build a point from its coordinate in a given chart.
    pub fn from_coordinate(u: Complex64, chart: Chart) -> Self {
        match chart {
            Chart::Finite => Self::finite(u),
            Chart::Infinity => Self::from_reciprocal(u),
        }
    }

    /// The same point in the other chart, when both charts are valid
    /// (`1 <= |z| <= CHART_CROSSOVER`).
    pub fn in_other_chart(&self) -> Option<SpherePoint> {
        let m = self.value.norm();
        match self.chart {
            Chart::Finite if m >= 1.0 => Some(SpherePoint {
                value: self.value.inv(),
                chart: Chart::Infinity,
            }),
            Chart::Infinity if m >= 1.0 / CHART_CROSSOVER => Some(SpherePoint {
                value: self.value.inv(),
                chart: Chart::Finite,
            }),
            _ => None,
        }
    }

    /// The point `1/z`.
    pub fn recip(&self) -> SpherePoint {
        match self.chart {
            Chart::Finite => Self::from_reciprocal(self.value),
            Chart::Infinity => Self::finite(self.value),
        }
    }

    /// Image on the unit sphere under inverse stereographic projection
    /// (north pole = infinity).
    pub fn embed(&self) -> [f64; 3] {
        let v = self.value;
        let s = 1.0 + v.norm_sqr();
        match self.chart {
            Chart::Finite => [2.0 * v.re / s, 2.0 * v.im / s, (v.norm_sqr() - 1.0) / s],
            Chart::Infinity => [2.0 * v.re / s, -2.0 * v.im / s, (1.0 - v.norm_sqr()) / s],
        }
    }

    /// Stereographic projection of a point of the unit sphere.
    pub fn from_embedding(p: [f64; 3]) -> SpherePoint {
        let [x, y, z] = p;
        if z <= 0.0 {
            Self::finite(Complex64::new(x, y) / (1.0 - z))
        } else {
            SpherePoint {
                value: Complex64::new(x, -y) / (1.0 + z),
                chart: Chart::Infinity,
            }
        }
    }
}

impl PartialEq for SpherePoint {
    fn eq(&self, other: &Self) -> bool {
        chordal_distance(self, other) == 0.0
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        Self::finite(z)
    }
}

impl From<f64> for SpherePoint {
    fn from(x: f64) -> Self {
        Self::real(x)
    }
}

/// Chordal distance `2|z - w| / sqrt((1+|z|^2)(1+|w|^2))`, in `[0, 2]`.
pub fn chordal_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    let (a, b) = (p.value, q.value);
    let scale = ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt();
    let num = if p.chart == q.chart {
        (a - b).norm()
    } else {
        (a * b - 1.0).norm()
    };
    (2.0 * num / scale).min(2.0)
}

/// Chord length between two points already embedded in the unit sphere.
pub fn chord(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
