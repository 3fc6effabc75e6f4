#![allow(dead_code)]

use num_complex::Complex64;
use pinchlab::moduli::{AnnulusRegion, QuadRegion};
use std::f64::consts::PI;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Regular `n`-gon on the circle `|z - center| = r`, starting at angle 0.
pub fn circle(center: Complex64, r: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| center + Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64)).collect()
}

/// Annulus between `r = 1 + a cos(kθ)` and `R = 40 (1 + b sin(mθ))`.
pub fn distorted_annulus(a: f64, k: f64, b: f64, m: f64) -> AnnulusRegion {
    let n = 1024;
    let theta = |j: usize| 2.0 * PI * j as f64 / n as f64;
    let inner = (0..n).map(|j| Complex64::from_polar(1.0 + a * (k * theta(j)).cos(), theta(j))).collect();
    let outer = (0..n).map(|j| Complex64::from_polar(40.0 * (1.0 + b * (m * theta(j)).sin()), theta(j))).collect();
    AnnulusRegion::sampled(inner, outer).unwrap()
}

/// The ten distorted annuli used for the round-extraction bound.
pub fn distorted_suite() -> Vec<AnnulusRegion> {
    [
        (0.0, 1.0, 0.0, 1.0),
        (0.1, 2.0, 0.0, 1.0),
        (0.2, 3.0, 0.05, 2.0),
        (0.3, 2.0, 0.1, 3.0),
        (0.15, 5.0, 0.15, 4.0),
        (0.4, 3.0, 0.05, 5.0),
        (0.25, 4.0, 0.2, 2.0),
        (0.05, 7.0, 0.1, 7.0),
        (0.35, 6.0, 0.12, 3.0),
        (0.45, 2.0, 0.18, 6.0),
    ]
    .into_iter()
    .map(|(a, k, b, m)| distorted_annulus(a, k, b, m))
    .collect()
}

/// Quadrant `q` of the polygonal annulus between the `n`-gons of radius
/// `r_in` and `r_out` about 0 (n divisible by 4), with side 0 on the inner arc.
pub fn polygon_quadrant(r_in: f64, r_out: f64, n: usize, q: usize) -> QuadRegion {
    let quarter = n / 4;
    let inner = circle(c(0.0, 0.0), r_in, n);
    let outer = circle(c(0.0, 0.0), r_out, n);
    let mut v: Vec<(f64, f64)> = Vec::new();
    for j in q * quarter..=(q + 1) * quarter {
        let z = inner[j % n];
        v.push((z.re, z.im));
    }
    for j in (q * quarter..=(q + 1) * quarter).rev() {
        let z = outer[j % n];
        v.push((z.re, z.im));
    }
    QuadRegion::new(v, [0, quarter, quarter + 1, 2 * quarter + 1]).unwrap()
}

/// Spectral radius from a dense complex eigensolver. Eigenvalues of a Jordan
/// block come back scattered by about `eps^{1/k}`; the mean of each cluster
/// is accurate to rounding, so clusters are averaged before taking moduli.
pub fn dense_radius(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let eig: Vec<Complex64> = a.complex_eigenvalues().iter().copied().collect();
    let mut label: Vec<usize> = (0..eig.len()).collect();
    for i in 0..eig.len() {
        for j in 0..i {
            if (eig[i] - eig[j]).norm() < 1e-5 {
                let (li, lj) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == li {
                        *l = lj;
                    }
                }
            }
        }
    }
    let mut best = 0.0f64;
    for l in 0..eig.len() {
        let members: Vec<Complex64> = (0..eig.len()).filter(|&i| label[i] == l).map(|i| eig[i]).collect();
        if !members.is_empty() {
            best = best.max((members.iter().sum::<Complex64>() / members.len() as f64).norm());
        }
    }
    best
}
