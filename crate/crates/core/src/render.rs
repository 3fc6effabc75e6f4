//! Raster output: escape-time and inverse-iteration pictures of Julia sets,
//! scalar fields and region masks. Images are written as binary PPM, or as
//! PNG when the path ends in `.png`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

use crate::dynamics::escape_radius;
use crate::moduli::AnnulusRegion;
use crate::parabolic::Petal;
use crate::pinch_path::{julia_sample, PathError};
use crate::rational::RationalMap;
use crate::SpherePoint;

/// Escape-time iteration budget.
pub const MAX_ESCAPE_ITER: usize = 256;
/// Backward-orbit points drawn per pixel for non-polynomial maps.
const DENSITY_POINTS_PER_PIXEL: usize = 4;
const INTERIOR: [u8; 3] = [0, 0, 0];
const BACKGROUND: [u8; 3] = [255, 255, 255];

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("empty viewport or zero image size")]
    BadViewport,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("png encoding: {0}")]
    Png(#[from] png::EncodingError),
    #[error(transparent)]
    Sampling(#[from] PathError),
}

/// The rectangle `[re_min, re_max] × [im_min, im_max]` of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Viewport {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, RenderError> {
        if !(re_min < re_max && im_min < im_max) || ![re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite()) {
            return Err(RenderError::BadViewport);
        }
        Ok(Viewport { re_min, re_max, im_min, im_max })
    }

    /// The square `[-r, r]²`.
    pub fn square(r: f64) -> Result<Self, RenderError> {
        Self::new(-r, r, -r, r)
    }

    /// Center of pixel `(i, j)`, with row 0 at the top.
    pub fn pixel_center(&self, i: usize, j: usize, width: usize, height: usize) -> Complex64 {
        Complex64::new(
            self.re_min + (i as f64 + 0.5) * (self.re_max - self.re_min) / width as f64,
            self.im_max - (j as f64 + 0.5) * (self.im_max - self.im_min) / height as f64,
        )
    }

    /// Pixel containing `z`, if any.
    pub fn pixel_of(&self, z: Complex64, width: usize, height: usize) -> Option<(usize, usize)> {
        let x = (z.re - self.re_min) / (self.re_max - self.re_min) * width as f64;
        let y = (self.im_max - z.im) / (self.im_max - self.im_min) * height as f64;
        if x >= 0.0 && y >= 0.0 && x < width as f64 && y < height as f64 {
            Some((x as usize, y as usize))
        } else {
            None
        }
    }
}

/// An 8-bit RGB raster, rows top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Image {
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        Image { width, height, data: color.repeat(width * height) }
    }

    pub fn get(&self, i: usize, j: usize) -> [u8; 3] {
        let k = 3 * (j * self.width + i);
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    pub fn set(&mut self, i: usize, j: usize, color: [u8; 3]) {
        let k = 3 * (j * self.width + i);
        self.data[k..k + 3].copy_from_slice(&color);
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn to_png(&self) -> Result<Vec<u8>, RenderError> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header()?;
            writer.write_image_data(&self.data)?;
        }
        Ok(out)
    }

    /// Write as PNG if the extension is `.png`, binary PPM otherwise.
    pub fn write(&self, path: &Path) -> Result<(), RenderError> {
        let png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
        let bytes = if png { self.to_png()? } else { self.to_ppm() };
        let mut file = std::fs::File::create(path)?;
        file.write_all(&bytes)?;
        Ok(())
    }
}

fn check_size(width: usize, height: usize) -> Result<(), RenderError> {
    if width == 0 || height == 0 {
        return Err(RenderError::BadViewport);
    }
    Ok(())
}

/// Blue-to-yellow ramp for `s` in `[0, 1]`.
fn ramp(s: f64) -> [u8; 3] {
    let s = s.clamp(0.0, 1.0);
    [(255.0 * s.sqrt()) as u8, (255.0 * s) as u8, (96.0 + 159.0 * (1.0 - s)) as u8]
}

/// Escape-time picture of a polynomial's filled Julia set: escaping pixels
/// are shaded by escape time, the rest are black.
fn escape_time(map: &RationalMap, radius: f64, width: usize, height: usize, view: &Viewport) -> Image {
    let scale = map.denominator()[0];
    let coeffs: Vec<Complex64> = map.numerator().iter().map(|c| c / scale).collect();
    let mut img = Image::filled(width, height, INTERIOR);
    let r2 = radius * radius;
    for j in 0..height {
        for i in 0..width {
            let mut z = view.pixel_center(i, j, width, height);
            for n in 0..MAX_ESCAPE_ITER {
                if z.norm_sqr() > r2 {
                    img.set(i, j, ramp(1.0 - (n as f64 / 64.0).min(1.0)));
                    break;
                }
                z = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
            }
        }
    }
    img
}

/// Histogram of a backward-orbit sample, log-scaled to grey levels.
fn density(map: &RationalMap, width: usize, height: usize, view: &Viewport) -> Result<Image, RenderError> {
    let cloud = julia_sample(map, DENSITY_POINTS_PER_PIXEL * width * height, 0)?;
    plot_points(&cloud, width, height, view)
}

/// Points of a cloud as a log-density picture on white.
pub fn plot_points(cloud: &[SpherePoint], width: usize, height: usize, view: &Viewport) -> Result<Image, RenderError> {
    check_size(width, height)?;
    let mut counts = vec![0u32; width * height];
    for p in cloud {
        if let Some((i, j)) = p.to_finite().and_then(|z| view.pixel_of(z, width, height)) {
            counts[j * width + i] += 1;
        }
    }
    let top = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let mut img = Image::filled(width, height, BACKGROUND);
    for (k, &n) in counts.iter().enumerate() {
        if n > 0 {
            let level = (1.0 + n as f64).ln() / (1.0 + top).ln();
            let g = (200.0 * (1.0 - level)) as u8;
            img.set(k % width, k / width, [g, g, g]);
        }
    }
    Ok(img)
}

/// Julia set picture: escape time for polynomials, inverse-iteration density
/// for other rational maps. Deterministic.
pub fn render_julia(map: &RationalMap, width: usize, height: usize, view: &Viewport) -> Result<Image, RenderError> {
    check_size(width, height)?;
    match escape_radius(map) {
        Some(r) if map.degree() >= 2 => Ok(escape_time(map, r, width, height, view)),
        _ => density(map, width, height, view),
    }
}

/// Grey-scale picture of `f` over the viewport, mapping `[lo, hi]` to
/// black..white; pixels where `f` is `None` are left in the background color.
pub fn render_field<F>(f: F, lo: f64, hi: f64, width: usize, height: usize, view: &Viewport) -> Result<Image, RenderError>
where
    F: Fn(Complex64) -> Option<f64>,
{
    check_size(width, height)?;
    let mut img = Image::filled(width, height, [255, 240, 240]);
    for j in 0..height {
        for i in 0..width {
            if let Some(v) = f(view.pixel_center(i, j, width, height)) {
                let s = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
                let g = (255.0 * s.clamp(0.0, 1.0)) as u8;
                img.set(i, j, [g, g, g]);
            }
        }
    }
    Ok(img)
}

/// The annulus filled in grey on white.
pub fn render_region(region: &AnnulusRegion, width: usize, height: usize, view: &Viewport) -> Result<Image, RenderError> {
    check_size(width, height)?;
    let (inner, outer) = region.boundaries();
    let mut img = Image::filled(width, height, BACKGROUND);
    for j in 0..height {
        for i in 0..width {
            let z = view.pixel_center(i, j, width, height);
            if outer.contains(z) && !inner.contains(z) {
                img.set(i, j, [128, 128, 128]);
            }
        }
    }
    Ok(img)
}

/// The petal disk over the Julia picture, with forward orbits of the petal
/// samples traced in red.
pub fn render_petal(
    map: &RationalMap,
    petal: &Petal,
    orbit_steps: usize,
    width: usize,
    height: usize,
    view: &Viewport,
) -> Result<Image, RenderError> {
    let mut img = render_julia(map, width, height, view)?;
    for j in 0..height {
        for i in 0..width {
            if petal.contains(view.pixel_center(i, j, width, height)) {
                let [r, g, b] = img.get(i, j);
                img.set(i, j, [r / 2 + 64, g / 2 + 100, b / 2 + 64]);
            }
        }
    }
    for p in &petal.sample {
        let mut z = *p;
        for _ in 0..orbit_steps {
            if let Some((i, j)) = z.to_finite().and_then(|w| view.pixel_of(w, width, height)) {
                img.set(i, j, [220, 30, 30]);
            }
            z = map.eval(&z);
        }
    }
    Ok(img)
}
