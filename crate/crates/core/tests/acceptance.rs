//! One test per acceptance criterion. Each prints a single PASS/FAIL line to
//! stderr (bypassing the test harness capture) and then asserts.

mod common;

use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::time::Instant;

use common::{c, circle, dense_radius, distorted_suite, polygon_quadrant};
use num_complex::Complex64;
use pinchlab::distortion::{d1_sup, delta_bound, mobius_invariance_check, UnivalentSample, GRID_SLACK};
use pinchlab::dynamics::{classify, shrinking_probe, PointClass};
use pinchlab::moduli::*;
use pinchlab::multicurve::{build_matrix, irreducible_blocks, spectral_radius, CoverData, TransitionMatrix, BOUNDARY_TOL};
use pinchlab::parabolic::{abel_residual, build_petal};
use pinchlab::pinch_model::{beltrami, image_region, limit_sup_error, modulus_law_row, PinchingModel};
use pinchlab::pinch_path::{run_path, PathConfig};
use pinchlab::{Mobius, RationalMap, SpherePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, ok: bool, detail: String) {
    let line = format!("acceptance {n:>2} {name}: {} ({detail})\n", if ok { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(ok, "{}", line.trim_end());
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn criterion_01_round_annulus_closed_forms() {
    let mut worst_err = 0.0f64;
    let mut worst_time = 0.0f64;
    for m in [0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0] {
        let region = AnnulusRegion::round(c(-0.3, 0.8), 0.5, 0.5 * (2.0 * PI * m).exp()).unwrap();
        let start = Instant::now();
        let est = grid_modulus(&region, 512).unwrap();
        worst_time = worst_time.max(start.elapsed().as_secs_f64());
        worst_err = worst_err.max(rel(est.estimate, m));
    }
    report(
        1,
        "round annulus closed forms",
        worst_err < 0.01 && worst_time < 5.0,
        format!("max relative error {worst_err:.2e}, slowest {worst_time:.2} s"),
    );
}

#[test]
fn criterion_02_kappa_formula() {
    let exact = two_disk_modulus(0.25, 0.25).unwrap();
    let est = grid_modulus(&AnnulusRegion::two_disks(0.25, 0.25).unwrap(), 512).unwrap();
    let err = rel(est.estimate, exact);
    report(2, "two-disk kappa formula", err < 0.02, format!("grid {:.6}, closed form {exact:.6}, relative error {err:.2e}", est.estimate));
}

#[test]
fn criterion_03_sandwich_on_every_estimate() {
    let mut regions = Vec::new();
    for m in [0.05, 0.3, 1.0, 2.0] {
        regions.push(AnnulusRegion::round(c(0.0, 0.0), 1.0, (2.0 * PI * m).exp()).unwrap());
    }
    for (r1, r2) in [(0.25, 0.25), (0.1, 0.3), (0.45, 0.45)] {
        regions.push(AnnulusRegion::two_disks(r1, r2).unwrap());
    }
    regions.extend(distorted_suite());
    regions.push(AnnulusRegion::sampled(circle(c(0.0, 0.0), 1.0, 6), circle(c(0.0, 0.0), 4.0, 5)).unwrap());
    let model = PinchingModel::new(3.0, 2.0).unwrap();
    regions.push(image_region(&model, -model.log_r(), model.log_r(), 512).unwrap());
    let mut invocations = 0;
    let mut violations = 0;
    for region in &regions {
        for resolution in [64, 256] {
            let est = grid_modulus(region, resolution).unwrap();
            invocations += 1;
            violations += usize::from(!est.sandwich_holds());
        }
    }
    let raster = Raster::cartesian(-0.05, -0.05, 0.01, 320, 120);
    for (w, h) in [(1.0, 1.0), (3.0, 1.0), (0.25, 1.0)] {
        let est = quad_modulus(&raster, &QuadRegion::rectangle_horizontal(0.0, w, 0.0, h)).unwrap();
        invocations += 1;
        violations += usize::from(!est.sandwich_holds());
    }
    report(3, "flat-metric sandwich", violations == 0, format!("{violations} violations in {invocations} estimates"));
}

#[test]
fn criterion_04_round_annulus_extraction() {
    let loss = 5.0 * LN_2 / (2.0 * PI);
    let mut worst = f64::INFINITY;
    let mut all = true;
    for region in distorted_suite() {
        let r = extract_round_annulus_report(&region, c(0.0, 0.0), 512).unwrap();
        let margin = r.extracted_modulus - (r.input_modulus - loss - LEMMA_SLACK);
        worst = worst.min(margin);
        all &= margin >= 0.0;
    }
    report(4, "round annulus extraction bound", all, format!("10 fixtures, smallest margin {worst:.4}"));
}

#[test]
fn criterion_05_quadrilateral_harnesses() {
    let mut margins = Vec::new();
    let region = AnnulusRegion::round(c(0.0, 0.0), 1.0, (2.0 * PI).exp()).unwrap();
    let raster = annulus_raster(&region, c(0.0, 0.0), 512).unwrap();
    let sectors: Vec<QuadRegion> = (0..4)
        .map(|k| QuadRegion::rectangle_radial(0.0, 2.0 * PI, k as f64 * PI / 2.0, (k + 1) as f64 * PI / 2.0))
        .collect();
    margins.push(verify_quad_annulus_inequality(&region, &raster, &sectors).unwrap().margin);

    let n = 1024;
    let region = AnnulusRegion::sampled(circle(c(0.0, 0.0), 1.0, n), circle(c(0.0, 0.0), 3.0, n)).unwrap();
    let raster = Raster::cartesian(-3.2, -3.2, 6.4 / 384.0, 384, 384);
    let quads: Vec<QuadRegion> = (0..4).map(|q| polygon_quadrant(1.0, 3.0, n, q)).collect();
    margins.push(verify_quad_annulus_inequality(&region, &raster, &quads).unwrap().margin);

    for (q1_right, q3_left, beta1, beta3) in [(1.25, 1.75, 1.0, 2.0), (1.4, 1.6, 0.8, 2.2), (1.1, 2.0, 0.5, 2.5)] {
        let cfg = ThreeQuadConfig { x0: 0.0, x1: 3.0, y0: 0.0, y1: 1.0, q1_right, q3_left, beta1, beta3 };
        margins.push(verify_three_quadrilateral_inequality(&cfg, 1.0 / 100.0).unwrap().margin);
    }
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    report(5, "quadrilateral inequalities", worst >= -LEMMA_SLACK, format!("{} fixtures, smallest relative margin {worst:.2e}", margins.len()));
}

#[test]
fn criterion_06_pinching_model_laws() {
    let r = (PI / 4.0).exp();
    let mut stretch_err = 0.0f64;
    for t in [0.0, 1.0, 2.0, 5.0] {
        let row = modulus_law_row(r, t, None, 1024, 512).unwrap();
        stretch_err = stretch_err.max(rel(row.measured, row.predicted));
    }
    let mut closed_err = 0.0f64;
    let mut grid_err = 0.0f64;
    for (t0, t) in [(0.0, 0.0), (0.5, 3.0), (1.0, 2.0), (2.0, 6.0)] {
        let row = modulus_law_row(r, t, Some(t0), 1024, 512).unwrap();
        closed_err = closed_err.max((row.closed_form - row.predicted).abs());
        grid_err = grid_err.max(rel(row.measured, row.predicted));
    }
    let mut outer_nonzero = 0;
    for t in [0.0, 0.5, 3.0] {
        let model = PinchingModel::new(4.0, t).unwrap();
        let (_, outer_knot) = model.knots();
        for k in 1..200 {
            // |log|z|| strictly between log r' and log r
            let s = outer_knot + (model.log_r() - outer_knot) * k as f64 / 200.0;
            for sign in [1.0, -1.0] {
                let z = Complex64::from_polar((sign * s).exp(), 0.37 * k as f64);
                outer_nonzero += usize::from(beltrami(z, &model).unwrap() != Complex64::new(0.0, 0.0));
            }
        }
    }
    let limit = limit_sup_error(&PinchingModel::new(r, 10.0).unwrap(), 10_000).unwrap();
    let ok = stretch_err < 0.01 && closed_err < 1e-12 && grid_err < 0.01 && outer_nonzero == 0 && limit < 1e-3;
    report(
        6,
        "pinching model laws",
        ok,
        format!(
            "stretch law {stretch_err:.2e}, sub-annulus closed form {closed_err:.1e} / grid {grid_err:.2e}, \
             nonzero mu in outer zone {outer_nonzero}, limit sup error {limit:.2e}"
        ),
    );
}

fn fixture(name: &str) -> TransitionMatrix {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let data: CoverData = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    build_matrix(&data).unwrap()
}

#[test]
fn criterion_07_obstruction_linear_algebra() {
    let genuine: Vec<TransitionMatrix> =
        ["rabbit.json", "airplane.json", "cauliflower_mating.json"].iter().map(|n| fixture(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut matrices = genuine.clone();
    for n in 1..=8 {
        for _ in 0..25 {
            let rows = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| match rng.random_range(0..7) {
                            0..=2 => 0.0,
                            3 => 1.0,
                            4 => 0.5,
                            5 => 1.0 / 3.0,
                            _ => rng.random_range(0.0..2.0),
                        })
                        .collect()
                })
                .collect();
            matrices.push(TransitionMatrix::from_rows(rows).unwrap());
        }
    }
    let mut radius_err = 0.0f64;
    let mut block_err = 0.0f64;
    for m in &matrices {
        let lambda = spectral_radius(m).unwrap();
        radius_err = radius_err.max((lambda - dense_radius(m.rows())).abs());
        let best = irreducible_blocks(m).iter().map(|b| spectral_radius(b).unwrap()).fold(0.0, f64::max);
        block_err = block_err.max((best - lambda).abs());
    }
    let genuine_max = genuine.iter().map(|m| spectral_radius(m).unwrap()).fold(0.0, f64::max);
    let ok = radius_err < 1e-10 && block_err < 1e-10 && genuine_max <= 1.0 + BOUNDARY_TOL;
    report(
        7,
        "obstruction linear algebra",
        ok,
        format!(
            "{} matrices, radius error {radius_err:.1e}, block error {block_err:.1e}, largest genuine lambda {genuine_max:.12}",
            matrices.len()
        ),
    );
}

#[test]
fn criterion_08_pinching_path_convergence() {
    let start = Instant::now();
    let path = run_path(&PathConfig::default_run()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let last = path.rows.last().unwrap();
    let c_err = (last.c - Complex64::new(0.25, 0.0)).norm();
    let v = &path.verdicts;
    let ok = c_err < 1e-3 && last.sup_dist_to_g < 1e-2 && v.pass && elapsed < 120.0;
    report(
        8,
        "pinching path convergence",
        ok,
        format!(
            "|c(50) - 1/4| = {c_err:.2e}, sup distance {:.2e}, tails decreasing {}/{}/{}, {elapsed:.1} s",
            last.sup_dist_to_g, v.sup_tail_decreasing, v.julia_tail_decreasing, v.gap_tail_decreasing
        ),
    );
}

#[test]
fn criterion_09_plumbing_direction() {
    let path = run_path(&PathConfig::default_run()).unwrap();
    let view = path.plumbing_view();
    let mut certified = 0;
    for row in &view {
        // the attracting fixed point of z² + c with multiplier λ is λ/2
        let map = RationalMap::quadratic(row.c);
        let pp = classify(&map, &SpherePoint::finite(row.lambda / 2.0), 1).unwrap();
        if row.certified_attracting && pp.class == PointClass::Attracting && pp.multiplier.norm() < 1.0 {
            certified += 1;
        }
    }
    let ok = certified == view.len() && path.plumbing_moves_away() && view[0].sup_dist_to_g < 1e-2;
    report(
        9,
        "plumbing direction",
        ok,
        format!(
            "{certified}/{} rows attracting, sup distance {:.2e} at t = {} growing to {:.2e} at t = {}",
            view.len(),
            view[0].sup_dist_to_g,
            view[0].t,
            view.last().unwrap().sup_dist_to_g,
            view.last().unwrap().t
        ),
    );
}

#[test]
fn criterion_10_parabolic_toolkit() {
    let mobius = RationalMap::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
    let z_plus_z2 = RationalMap::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let cauliflower = RationalMap::quadratic(c(0.25, 0.0));
    let mut residuals = Vec::new();
    let mut violations = 0;
    for (map, y, tol) in [(&mobius, 0.0, 1e-12), (&z_plus_z2, 0.0, 1e-6), (&cauliflower, 0.5, 1e-6)] {
        let pp = classify(map, &SpherePoint::real(y), 1).unwrap();
        let petal = build_petal(map, &pp, 0.5).unwrap();
        for s in &petal.sample {
            let img = map.eval_complex(s.value());
            if !((img - petal.center()).norm() < petal.radius() || (img - y).norm() < 1e-8) {
                violations += 1;
            }
        }
        residuals.push((abel_residual(map, &petal, 100).unwrap(), tol));
    }
    let ok = violations == 0 && residuals.iter().all(|(r, tol)| r < tol);
    report(
        10,
        "parabolic toolkit",
        ok,
        format!(
            "Abel residuals {:.1e} / {:.1e} / {:.1e}, invariance violations {violations}",
            residuals[0].0, residuals[1].0, residuals[2].0
        ),
    );
}

#[test]
fn criterion_11_shrinking_probe() {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, c0, center, radius) in [("z^2", 0.0, 3.0, 0.1), ("z^2-1", -1.0, 2.0, 0.05)] {
        let f = RationalMap::quadratic(c(c0, 0.0));
        let cn = shrinking_probe(&f, &SpherePoint::real(center), radius, 10).unwrap();
        let tail = &cn[7..];
        let eventually_decreasing = tail.windows(2).all(|w| w[1] < w[0]);
        let shrunk = cn[7] < cn[0] / 4.0;
        ok &= eventually_decreasing && shrunk;
        details.push(format!("{name}: C_1 {:.3e}, C_8 {:.3e}, tail decreasing {eventually_decreasing}", cn[0], cn[7]));
    }
    report(11, "shrinking probe", ok, details.join("; "));
}

#[test]
fn criterion_12_distortion() {
    let mut worst_ratio = 0.0f64;
    let mut ok = true;
    for eps in [0.01, 0.05, 0.1] {
        let s = UnivalentSample::perturbed_identity(eps).unwrap();
        let d1 = d1_sup(&s, 10_000, 0).unwrap();
        let bound = 2.0 * PI * delta_bound(eps) + GRID_SLACK;
        worst_ratio = worst_ratio.max(d1 / bound);
        ok &= d1 <= bound;
    }
    let s = UnivalentSample::perturbed_identity(0.1).unwrap();
    let beta = Mobius::new(c(1.0, 0.5), c(0.2, -0.1), c(0.1, 0.05), c(1.3, 0.2)).unwrap();
    let gamma = Mobius::new(c(0.7, -0.2), c(1.0, 0.3), c(-0.4, 0.1), c(2.0, 0.0)).unwrap();
    let inv = mobius_invariance_check(&s, &beta, &gamma, 1000, 3).unwrap();
    ok &= inv.max_residual < 1e-9;
    report(
        12,
        "distortion",
        ok,
        format!("largest d1_sup / (2 pi delta + slack) = {worst_ratio:.3}, Mobius residual {:.1e}", inv.max_residual),
    );
}
