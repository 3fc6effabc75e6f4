//! Browser bindings for the demo page in `www/`.
//!
//! Each export has a plain Rust counterpart returning `Result<_, String>`, so
//! the computations are testable without a JavaScript host.

use pinchlab::distortion::{disk_pair_config, UnivalentSample};
use pinchlab::moduli::Boundary;
use pinchlab::pinch_model::{beltrami, PinchingModel};
use pinchlab::pinch_path::{multiplier_schedule, quadratic_parameter};
use pinchlab::render::{render_field, render_julia, Image, Viewport};
use pinchlab::{Complex64, RationalMap};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn rgba(image: &Image) -> Vec<u8> {
    image.data.chunks_exact(3).flat_map(|p| [p[0], p[1], p[2], 255]).collect()
}

/// Multiplier and parameter `c` of the pinching path at time `t`, as JSON.
pub fn path_point(lambda_re: f64, lambda_im: f64, t: f64) -> Result<String, String> {
    let lambda = multiplier_schedule(Complex64::new(lambda_re, lambda_im), t).map_err(|e| e.to_string())?;
    let c = quadratic_parameter(lambda);
    Ok(json!({ "t": t, "lambda": [lambda.re, lambda.im], "c": [c.re, c.im] }).to_string())
}

/// RGBA escape-time picture of `z² + c(t)` on `[-2, 2]²`.
pub fn julia_frame(lambda_re: f64, lambda_im: f64, t: f64, width: usize, height: usize) -> Result<Vec<u8>, String> {
    let lambda = multiplier_schedule(Complex64::new(lambda_re, lambda_im), t).map_err(|e| e.to_string())?;
    let map = RationalMap::quadratic(quadratic_parameter(lambda));
    let view = Viewport::square(2.0).map_err(|e| e.to_string())?;
    let image = render_julia(&map, width, height, &view).map_err(|e| e.to_string())?;
    Ok(rgba(&image))
}

/// RGBA picture of `|μ_t|` for the model annulus `A(r)` on `[-1.05 r, 1.05 r]²`.
pub fn mu_raster(r: f64, t: f64, size: usize) -> Result<Vec<u8>, String> {
    let model = PinchingModel::new(r, t).map_err(|e| e.to_string())?;
    let view = Viewport::square(1.05 * r).map_err(|e| e.to_string())?;
    let image = render_field(|z| beltrami(z, &model).ok().map(|mu| mu.norm()), 0.0, 1.0, size, size, &view)
        .map_err(|e| e.to_string())?;
    Ok(rgba(&image))
}

/// Closed-form and grid modulus of the complement of `D(c1, r1) ∪ D(c2, r2)`,
/// as JSON.
pub fn disk_pair(c1: (f64, f64), r1: f64, c2: (f64, f64), r2: f64, resolution: usize) -> Result<String, String> {
    let (a, b) = (Complex64::new(c1.0, c1.1), Complex64::new(c2.0, c2.1));
    // any disk containing both closed disks will do as the identity's domain
    let mid = (a + b) / 2.0;
    let radius = 2.0 * ((a - mid).norm() + r1).max((b - mid).norm() + r2);
    let domain = vec![Boundary::Circle { center: mid, radius }];
    let identity = UnivalentSample::new(RationalMap::identity(), domain).map_err(|e| e.to_string())?;
    let cfg = disk_pair_config(&identity, (a, r1), (b, r2), resolution).map_err(|e| e.to_string())?;
    Ok(json!({
        "closed_form": cfg.source_closed_form,
        "grid": cfg.source_grid,
        "relative_error": (cfg.source_grid - cfg.source_closed_form).abs() / cfg.source_closed_form,
    })
    .to_string())
}

#[wasm_bindgen(js_name = pathPoint)]
pub fn path_point_js(lambda_re: f64, lambda_im: f64, t: f64) -> Result<String, JsError> {
    path_point(lambda_re, lambda_im, t).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = juliaFrame)]
pub fn julia_frame_js(lambda_re: f64, lambda_im: f64, t: f64, width: usize, height: usize) -> Result<Vec<u8>, JsError> {
    julia_frame(lambda_re, lambda_im, t, width, height).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = muRaster)]
pub fn mu_raster_js(r: f64, t: f64, size: usize) -> Result<Vec<u8>, JsError> {
    mu_raster(r, t, size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = diskPairModulus)]
#[allow(clippy::too_many_arguments)]
pub fn disk_pair_js(x1: f64, y1: f64, r1: f64, x2: f64, y2: f64, r2: f64, resolution: usize) -> Result<String, JsError> {
    disk_pair((x1, y1), r1, (x2, y2), r2, resolution).map_err(|e| JsError::new(&e))
}
