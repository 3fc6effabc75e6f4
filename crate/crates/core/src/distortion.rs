//! Distortion functionals of univalent maps: the modulus-difference
//! distortion `D₀` (sampled over pairs of round disks) and the two-point
//! distortion `D₁(z, w) = |log(|φ'(z)φ'(w)||z-w|² / |φ(z)-φ(w)|²)|`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::moduli::{disk_pair_modulus, grid_modulus_about, AnnulusRegion, Boundary, ModulusError};
use crate::rational::{Mobius, RationalMap};
use crate::sphere::SpherePoint;

/// Random points whose images are checked for a second preimage in the
/// domain when a sample is built.
pub const INJECTIVITY_PAIRS: usize = 10_000;
/// Grid discretization allowance when comparing `D₁` with `2π D₀`.
pub const GRID_SLACK: f64 = 0.02;
/// A Möbius-invariance residual below this passes.
pub const MOBIUS_TOL: f64 = 1e-9;
/// Boundary points per disk when mapping test continua.
const DISK_SAMPLES: usize = 512;
/// Give up on rejection sampling after this many candidates per accepted one.
const MAX_REJECTIONS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistortionError {
    #[error("the two points coincide")]
    CoincidentPoints,
    #[error("point {0} is outside the domain or maps to infinity")]
    OutsideDomain(Complex64),
    #[error("map is not injective on the domain: {0} and {1} have the same image")]
    NotInjective(Complex64, Complex64),
    #[error("bad domain: {0}")]
    BadDomain(String),
    #[error(transparent)]
    Modulus(#[from] ModulusError),
}

/// A rational map restricted to a union of open disks and polygons.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnivalentSample {
    map: RationalMap,
    domain: Vec<Boundary>,
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

/// Halton sequence in `[0,1)^4` (bases 2, 3, 5, 7) with a random
/// Cranley-Patterson shift drawn from `seed`.
struct ShiftedHalton {
    shift: [f64; 4],
    index: u64,
}

impl ShiftedHalton {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ShiftedHalton { shift: [(); 4].map(|_| rng.random::<f64>()), index: 1 }
    }
}

impl Iterator for ShiftedHalton {
    type Item = [f64; 4];

    fn next(&mut self) -> Option<[f64; 4]> {
        let k = self.index;
        self.index += 1;
        let bases = [2, 3, 5, 7];
        Some([0, 1, 2, 3].map(|i| (radical_inverse(k, bases[i]) + self.shift[i]).fract()))
    }
}

impl UnivalentSample {
    /// Restrict `map` to the union of the interiors of `domain`. Injectivity
    /// and finiteness are spot-checked at random points.
    pub fn new(map: RationalMap, domain: Vec<Boundary>) -> Result<Self, DistortionError> {
        if domain.is_empty() {
            return Err(DistortionError::BadDomain("no components".into()));
        }
        let sample = UnivalentSample { map, domain };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (lo, hi) = sample.bounding_box();
        let mut draw = || {
            loop {
                let z = Complex64::new(rng.random_range(lo.re..hi.re), rng.random_range(lo.im..hi.im));
                if sample.contains(z) {
                    return z;
                }
            }
        };
        for _ in 0..INJECTIVITY_PAIRS {
            // pair each sample with the other preimages of its image
            let z = draw();
            sample.image(z)?;
            let pre = sample
                .map
                .preimages(&SpherePoint::finite(sample.map.eval_complex(z)))
                .map_err(|e| DistortionError::BadDomain(e.to_string()))?;
            for w in pre.iter().filter_map(SpherePoint::to_finite) {
                if (w - z).norm() > 1e-10 && sample.contains(w) {
                    return Err(DistortionError::NotInjective(z, w));
                }
            }
        }
        Ok(sample)
    }

    /// `z + ε z²` on the unit disk (univalent for `|ε| <= 1/2`).
    pub fn perturbed_identity(eps: f64) -> Result<Self, DistortionError> {
        let map = RationalMap::polynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(eps, 0.0)])
            .map_err(|e| DistortionError::BadDomain(e.to_string()))?;
        Self::new(map, vec![Boundary::Circle { center: Complex64::new(0.0, 0.0), radius: 1.0 }])
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    pub fn domain(&self) -> &[Boundary] {
        &self.domain
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.domain.iter().any(|b| b.contains(z))
    }

    fn bounding_box(&self) -> (Complex64, Complex64) {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for b in &self.domain {
            let (a, c) = match b {
                Boundary::Circle { center, radius } => {
                    (center - Complex64::new(*radius, *radius), center + Complex64::new(*radius, *radius))
                }
                Boundary::Polyline(pts) => pts.iter().fold((hi, lo), |(a, c), p| {
                    (Complex64::new(a.re.min(p.re), a.im.min(p.im)), Complex64::new(c.re.max(p.re), c.im.max(p.im)))
                }),
            };
            lo = Complex64::new(lo.re.min(a.re), lo.im.min(a.im));
            hi = Complex64::new(hi.re.max(c.re), hi.im.max(c.im));
        }
        (lo, hi)
    }

    /// A lower bound for the distance from `z` to the boundary of the domain.
    fn depth(&self, z: Complex64) -> f64 {
        self.domain
            .iter()
            .filter(|b| b.contains(z))
            .map(|b| match b {
                Boundary::Circle { center, radius } => radius - (z - center).norm(),
                poly => poly.distance_to(z),
            })
            .fold(0.0, f64::max)
    }

    fn image(&self, z: Complex64) -> Result<Complex64, DistortionError> {
        let w = self.map.eval_complex(z);
        if w.is_finite() {
            Ok(w)
        } else {
            Err(DistortionError::OutsideDomain(z))
        }
    }

    /// Deterministic quasi-random points of the domain, in pairs.
    fn pairs(&self, seed: u64) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let (lo, hi) = self.bounding_box();
        let span = hi - lo;
        ShiftedHalton::new(seed)
            .map(move |u| {
                (
                    lo + Complex64::new(u[0] * span.re, u[1] * span.im),
                    lo + Complex64::new(u[2] * span.re, u[3] * span.im),
                )
            })
    }

    fn accepted_pairs(&self, n: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
        self.pairs(seed)
            .take(n.saturating_mul(MAX_REJECTIONS))
            .filter(|&(z, w)| z != w && self.contains(z) && self.contains(w))
            .take(n)
            .collect()
    }
}

/// `D₁` for any map, with no domain check.
fn two_point(map: &RationalMap, z: Complex64, w: Complex64) -> Result<f64, DistortionError> {
    if z == w {
        return Err(DistortionError::CoincidentPoints);
    }
    let value = |p: Complex64| {
        let v = map.eval_complex(p);
        let d = map.derivative(&SpherePoint::finite(p)).map_err(|_| DistortionError::OutsideDomain(p))?;
        if v.is_finite() && p.is_finite() {
            Ok((v, d))
        } else {
            Err(DistortionError::OutsideDomain(p))
        }
    };
    let (fz, dz) = value(z)?;
    let (fw, dw) = value(w)?;
    let ratio = (dz * dw).norm() * ((z - w).norm() / (fz - fw).norm()).powi(2);
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(DistortionError::NotInjective(z, w));
    }
    Ok(ratio.ln().abs())
}

pub fn d1_pointpair(sample: &UnivalentSample, z: Complex64, w: Complex64) -> Result<f64, DistortionError> {
    for p in [z, w] {
        if !sample.contains(p) {
            return Err(DistortionError::OutsideDomain(p));
        }
    }
    two_point(&sample.map, z, w)
}

/// Largest `D₁` over `n_pairs` quasi-random pairs of the domain. The pairs
/// for `n` are a prefix of those for `n + 1`.
pub fn d1_sup(sample: &UnivalentSample, n_pairs: usize, seed: u64) -> Result<f64, DistortionError> {
    let mut best = 0.0f64;
    for (z, w) in sample.accepted_pairs(n_pairs, seed) {
        best = best.max(two_point(&sample.map, z, w)?);
    }
    Ok(best)
}

/// One pair of disjoint round disks in the domain and the moduli of the
/// complements of the disks and of their images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskPairConfig {
    pub centers: [Complex64; 2],
    pub radii: [f64; 2],
    /// Closed form for the source disks.
    pub source_closed_form: f64,
    /// Grid estimate for the source disks, through the same pipeline as the image.
    pub source_grid: f64,
    pub image_grid: f64,
}

impl DiskPairConfig {
    pub fn difference(&self) -> f64 {
        (self.image_grid - self.source_grid).abs()
    }
}

/// Grid modulus of `A(E₁, E₂)` for closed curves `∂E₁`, `∂E₂` around
/// `a1 ∈ E₁` and `a2 ∈ E₂`: the inversion `ψ(w) = 1/(w - a2)` sends `E₂` to
/// a neighborhood of infinity, leaving a nested planar annulus.
fn separated_modulus(
    e1: &[Complex64],
    a1: Complex64,
    e2: &[Complex64],
    a2: Complex64,
    resolution: usize,
) -> Result<f64, ModulusError> {
    let psi = |w: &Complex64| 1.0 / (w - a2);
    let region = AnnulusRegion::sampled(e1.iter().map(psi).collect(), e2.iter().map(psi).collect())?;
    Ok(grid_modulus_about(&region, psi(&a1), resolution)?.estimate)
}

/// Moduli for the disks `D(c1, r1)` and `D(c2, r2)`, which must be
/// disjoint and lie in the domain.
pub fn disk_pair_config(
    sample: &UnivalentSample,
    (c1, r1): (Complex64, f64),
    (c2, r2): (Complex64, f64),
    resolution: usize,
) -> Result<DiskPairConfig, DistortionError> {
    for (c, r) in [(c1, r1), (c2, r2)] {
        if !(r > 0.0 && sample.depth(c) > r) {
            return Err(DistortionError::OutsideDomain(c));
        }
    }
    let circle = |c: Complex64, r: f64| -> Vec<Complex64> {
        (0..DISK_SAMPLES)
            .map(|k| c + Complex64::from_polar(r, 2.0 * PI * k as f64 / DISK_SAMPLES as f64))
            .collect()
    };
    let (e1, e2) = (circle(c1, r1), circle(c2, r2));
    let f1: Vec<Complex64> = e1.iter().map(|&z| sample.image(z)).collect::<Result<_, _>>()?;
    let f2: Vec<Complex64> = e2.iter().map(|&z| sample.image(z)).collect::<Result<_, _>>()?;
    Ok(DiskPairConfig {
        centers: [c1, c2],
        radii: [r1, r2],
        source_closed_form: disk_pair_modulus(c1, r1, c2, r2)?,
        source_grid: separated_modulus(&e1, c1, &e2, c2, resolution)?,
        image_grid: separated_modulus(&f1, sample.image(c1)?, &f2, sample.image(c2)?, resolution)?,
    })
}

/// Pairs of disjoint round disks `E₁, E₂` in the domain, with the grid
/// moduli of `A(E₁, E₂)` and `A(φE₁, φE₂)`.
pub fn d0_configs(
    sample: &UnivalentSample,
    n_configs: usize,
    seed: u64,
    resolution: usize,
) -> Result<Vec<DiskPairConfig>, DistortionError> {
    let mut halton = ShiftedHalton::new(seed ^ 0x5eed);
    let mut out = Vec::with_capacity(n_configs);
    for (c1, c2) in sample.accepted_pairs(n_configs, seed) {
        let [_, _, s1, s2] = halton.next().expect("infinite sequence");
        let room = |c: Complex64| sample.depth(c).min(0.5 * (c1 - c2).norm());
        let radii = [room(c1) * (0.3 + 0.5 * s1), room(c2) * (0.3 + 0.5 * s2)];
        if radii.iter().any(|r| !(*r > 1e-6)) {
            continue;
        }
        out.push(disk_pair_config(sample, (c1, radii[0]), (c2, radii[1]), resolution)?);
    }
    Ok(out)
}

/// Sampled lower bound for `D₀` over round-disk pairs. Source and image
/// moduli go through the same grid pipeline, so for the identity the
/// estimate is exactly 0 and for other maps discretization errors largely
/// cancel.
pub fn d0_estimate(sample: &UnivalentSample, n_configs: usize, seed: u64, resolution: usize) -> Result<f64, DistortionError> {
    Ok(d0_configs(sample, n_configs, seed, resolution)?
        .iter()
        .map(DiskPairConfig::difference)
        .fold(0.0, f64::max))
}

/// Analytic upper bound `δ(ε) = (1/π) log((1+2ε)/(1-2ε))` for `D₀` of
/// `z + εz²` on the unit disk, from `1 - 2ε <= |φ'| <= 1 + 2ε`.
pub fn delta_bound(eps: f64) -> f64 {
    let e = eps.abs();
    ((1.0 + 2.0 * e) / (1.0 - 2.0 * e)).ln() / PI
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusInvarianceReport {
    pub pairs: usize,
    pub max_residual: f64,
    pub pass: bool,
}

/// Compare `D₁(γ∘φ∘β)(β⁻¹z, β⁻¹w)` with `D₁(φ)(z, w)` on quasi-random pairs.
pub fn mobius_invariance_check(
    sample: &UnivalentSample,
    pre: &Mobius,
    post: &Mobius,
    n_pairs: usize,
    seed: u64,
) -> Result<MobiusInvarianceReport, DistortionError> {
    let composed = sample
        .map
        .conjugate_by(post, pre)
        .map_err(|e| DistortionError::BadDomain(e.to_string()))?;
    let back = pre.inverse();
    let pairs = sample.accepted_pairs(n_pairs, seed);
    let mut max_residual = 0.0f64;
    for &(z, w) in &pairs {
        let a = two_point(&sample.map, z, w)?;
        let b = two_point(&composed, back.apply_complex(z), back.apply_complex(w))?;
        max_residual = max_residual.max((a - b).abs());
    }
    Ok(MobiusInvarianceReport { pairs: pairs.len(), max_residual, pass: max_residual < MOBIUS_TOL })
}

/// Summary record for one map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub map_id: String,
    pub d1_sup: f64,
    pub d0_estimate: f64,
    /// `d1_sup / (2π d0_estimate)`; infinite when `d0_estimate` is 0.
    pub ratio: f64,
    /// `d1_sup <= 2π d0_estimate + GRID_SLACK`.
    pub pass_2pi_bound: bool,
}

pub fn distortion_report(
    map_id: &str,
    sample: &UnivalentSample,
    n_pairs: usize,
    n_configs: usize,
    seed: u64,
    resolution: usize,
) -> Result<DistortionReport, DistortionError> {
    let d1 = d1_sup(sample, n_pairs, seed)?;
    let d0 = d0_estimate(sample, n_configs, seed, resolution)?;
    let ratio = if d0 > 0.0 { d1 / (2.0 * PI * d0) } else if d1 == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(DistortionReport {
        map_id: map_id.to_string(),
        d1_sup: d1,
        d0_estimate: d0,
        ratio,
        pass_2pi_bound: d1 <= 2.0 * PI * d0 + GRID_SLACK,
    })
}
