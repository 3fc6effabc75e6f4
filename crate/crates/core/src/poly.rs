//! Dense complex polynomials stored as ascending coefficient slices, and a
//! root finder (companion-matrix eigenvalues followed by Newton polishing).

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("root finder did not converge (degree {degree})")]
    NoConvergence { degree: usize },
    #[error("zero polynomial has no well-defined roots")]
    ZeroPolynomial,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Degree after ignoring exactly-zero leading coefficients; `None` for the
/// zero polynomial.
pub fn degree(p: &[Complex64]) -> Option<usize> {
    p.iter().rposition(|c| *c != ZERO)
}

/// Drop exactly-zero leading coefficients.
pub fn trim(mut p: Vec<Complex64>) -> Vec<Complex64> {
    while p.last() == Some(&ZERO) {
        p.pop();
    }
    p
}

/// Drop leading coefficients that are negligible relative to the largest
/// coefficient.
pub fn trim_relative(mut p: Vec<Complex64>, rel: f64) -> Vec<Complex64> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while let Some(c) = p.last() {
        if c.norm() <= rel * scale {
            p.pop();
        } else {
            break;
        }
    }
    p
}

pub fn eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Value and first derivative by Horner's scheme.
pub fn eval_with_derivative(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = ZERO;
    let mut dv = ZERO;
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

pub fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(ZERO) + b.get(k).copied().unwrap_or(ZERO))
        .collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(ZERO) - b.get(k).copied().unwrap_or(ZERO))
        .collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn scale(p: &[Complex64], s: Complex64) -> Vec<Complex64> {
    p.iter().map(|c| c * s).collect()
}

/// Coefficients of `p(z0 + h)` as a polynomial in `h`.
pub fn taylor_shift(p: &[Complex64], z0: Complex64) -> Vec<Complex64> {
    let mut q = p.to_vec();
    let n = q.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            let next = q[k + 1];
            q[k] += z0 * next;
        }
    }
    q
}

/// Coefficients of `w^n p(1/w)` where `n` is the degree of `p`.
pub fn reversed(p: &[Complex64]) -> Vec<Complex64> {
    let mut q = trim(p.to_vec());
    q.reverse();
    q
}

/// Resultant of two polynomials via the Sylvester determinant.
pub fn resultant(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let a = trim(a.to_vec());
    let b = trim(b.to_vec());
    let (m, n) = match (degree(&a), degree(&b)) {
        (Some(m), Some(n)) => (m, n),
        _ => return ZERO,
    };
    if m == 0 {
        return a[0].powu(n as u32);
    }
    if n == 0 {
        return b[0].powu(m as u32);
    }
    let size = m + n;
    let mut s = DMatrix::<Complex64>::zeros(size, size);
    for row in 0..n {
        for k in 0..=m {
            s[(row, row + k)] = a[m - k];
        }
    }
    for row in 0..m {
        for k in 0..=n {
            s[(n + row, row + k)] = b[n - k];
        }
    }
    s.lu().determinant()
}

/// All complex roots of `p`, with multiplicity. Exactly-zero leading
/// coefficients are ignored; the caller decides whether tiny ones count.
pub fn roots(p: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    let p = trim(p.to_vec());
    let deg = degree(&p).ok_or(RootError::ZeroPolynomial)?;
    let mut out = Vec::with_capacity(deg);
    // roots at the origin are exact
    let lead_zeros = p.iter().position(|c| *c != ZERO).unwrap_or(0);
    out.extend(std::iter::repeat_n(ZERO, lead_zeros));
    let q: Vec<Complex64> = p[lead_zeros..].to_vec();
    let qdeg = q.len() - 1;
    match qdeg {
        0 => {}
        1 => out.push(-q[0] / q[1]),
        2 => {
            let (a, b, c) = (q[2], q[1], q[0]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            // choose the sign avoiding cancellation
            let s = if (b.conj() * disc).re >= 0.0 { b + disc } else { b - disc };
            if s == ZERO {
                out.push(ZERO);
                out.push(ZERO);
            } else {
                let r1 = -s / (2.0 * a);
                let r2 = -2.0 * c / s;
                out.push(r1);
                out.push(r2);
            }
        }
        _ => {
            let lead = q[qdeg];
            let mut companion = DMatrix::<Complex64>::zeros(qdeg, qdeg);
            for i in 1..qdeg {
                companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
            }
            for i in 0..qdeg {
                companion[(i, qdeg - 1)] = -q[i] / lead;
            }
            let schur = nalgebra::linalg::Schur::try_new(companion, 1e-15, 10_000 * qdeg)
                .ok_or(RootError::NoConvergence { degree: qdeg })?;
            let eig = schur
                .eigenvalues()
                .ok_or(RootError::NoConvergence { degree: qdeg })?;
            for z in eig.iter() {
                out.push(polish(&q, *z));
            }
        }
    }
    if out.iter().any(|z| !z.is_finite()) {
        return Err(RootError::NoConvergence { degree: deg });
    }
    Ok(out)
}

/// Newton iteration from `z`, keeping the iterate of smallest residual.
pub fn polish(p: &[Complex64], z: Complex64) -> Complex64 {
    let mut best = z;
    let mut best_res = eval(p, z).norm();
    let mut cur = z;
    for _ in 0..60 {
        let (v, dv) = eval_with_derivative(p, cur);
        if dv == ZERO || v == ZERO {
            break;
        }
        let step = v / dv;
        cur -= step;
        let res = eval(p, cur).norm();
        if !res.is_finite() {
            break;
        }
        if res < best_res {
            best = cur;
            best_res = res;
        }
        if step.norm() <= 1e-16 * cur.norm().max(1e-300) {
            break;
        }
    }
    best
}
