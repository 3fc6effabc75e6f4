//! Truncated power series in one complex variable.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients `s[0] + s[1] h + ... + s[order] h^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<Complex64>,
}

impl Series {
    pub fn new(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, ZERO);
        Series { coeffs }
    }

    pub fn identity(order: usize) -> Self {
        let mut c = vec![ZERO; order + 1];
        if order >= 1 {
            c[1] = Complex64::new(1.0, 0.0);
        }
        Series { coeffs: c }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        let mut out = vec![ZERO; n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }

    /// `self / other`; requires `other[0] != 0`.
    pub fn div(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        let d0 = other.coeffs[0];
        let mut out = vec![ZERO; n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * out[k - j];
            }
            out[k] = acc / d0;
        }
        Series { coeffs: out }
    }

    /// `self(inner(h))` where `inner` has zero constant term.
    pub fn compose(&self, inner: &Series) -> Series {
        debug_assert!(inner.coeffs[0].norm() == 0.0);
        let n = self.order().min(inner.order());
        let inner = Series::new(inner.coeffs[..=n].to_vec(), n);
        let mut acc = Series::new(vec![self.coeffs[n]], n);
        for k in (0..n).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += self.coeffs[k];
        }
        acc
    }
}
