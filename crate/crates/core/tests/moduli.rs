mod common;

use common::{c, circle, distorted_suite, polygon_quadrant};
use num_complex::Complex64;
use pinchlab::moduli::*;
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};
use std::time::Instant;

fn checked(region: &AnnulusRegion, resolution: usize) -> GridEstimate {
    let est = grid_modulus(region, resolution).unwrap();
    assert!(est.sandwich_holds(), "sandwich: {} <= {} <= {}", est.lower, est.estimate, est.upper);
    est
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn round_annuli_match_closed_form_at_512() {
    for m in [0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0] {
        let r_out = 0.7 * (2.0 * PI * m).exp();
        let region = AnnulusRegion::round(c(0.2, -0.4), 0.7, r_out).unwrap();
        let start = Instant::now();
        let est = checked(&region, 512);
        let elapsed = start.elapsed().as_secs_f64();
        assert!(rel(est.estimate, m) < 0.01, "m = {m}: {}", est.estimate);
        assert!(elapsed < 5.0, "m = {m} took {elapsed} s");
    }
}

#[test]
fn two_three_annulus() {
    let est = checked(&AnnulusRegion::round(c(0.0, 0.0), 2.0, 3.0).unwrap(), 512);
    assert!(rel(est.estimate, 1.5f64.ln() / (2.0 * PI)) < 0.01);
    let est = checked(&AnnulusRegion::round(c(0.0, 0.0), 1.0, 3.0).unwrap(), 512);
    assert!(rel(est.estimate, 3f64.ln() / (2.0 * PI)) < 0.01);
}

#[test]
fn two_disk_complement_matches_kappa_formula() {
    for (r1, r2) in [(0.25, 0.25), (0.1, 0.3), (0.4, 0.05), (0.45, 0.45)] {
        let exact = two_disk_modulus(r1, r2).unwrap();
        let est = checked(&AnnulusRegion::two_disks(r1, r2).unwrap(), 512);
        assert!(rel(est.estimate, exact) < 0.02, "({r1}, {r2}): {} vs {exact}", est.estimate);
    }
}

#[test]
fn two_disk_agrees_with_shifted_disk_pair() {
    // disk_pair_modulus normalizes by the center distance
    let a = disk_pair_modulus(c(1.0, 1.0), 0.5, c(3.0, 1.0), 0.5).unwrap();
    assert!((a - two_disk_modulus(0.25, 0.25).unwrap()).abs() < 1e-15);
    assert!(matches!(AnnulusRegion::two_disks(0.6, 0.4), Err(ModulusError::DisksTouch(_))));
    assert!(matches!(AnnulusRegion::two_disks(-0.1, 0.4), Err(ModulusError::BadRadii(..))));
}

#[test]
fn monotone_under_nested_round_annuli() {
    let radii = [(1.0, 2.0), (0.9, 2.0), (0.9, 2.5), (0.5, 2.5), (0.5, 6.0)];
    let mut last = 0.0;
    for (a, b) in radii {
        let est = checked(&AnnulusRegion::round(c(0.0, 0.0), a, b).unwrap(), 128);
        assert!(est.estimate > last);
        last = est.estimate;
    }
}

#[test]
fn polygonal_annulus_and_affine_invariance() {
    let region = AnnulusRegion::sampled(circle(c(0.0, 0.0), 1.0, 1024), circle(c(0.0, 0.0), 3.0, 1024)).unwrap();
    let est = checked(&region, 512);
    assert!(rel(est.estimate, 3f64.ln() / (2.0 * PI)) < 0.01);

    let moved = region.affine_image(c(2.0, 0.0), c(1.0, 0.0)).unwrap();
    let est2 = checked(&moved, 512);
    assert!(rel(est2.estimate, est.estimate) < 0.01);

    // Cartesian rasters with the same cell count per unit length do not map
    // onto each other, so this compares two genuinely different grids
    let a = grid_modulus_on(&region, &Raster::cartesian(-3.2, -3.2, 6.4 / 320.0, 320, 320)).unwrap();
    let b = grid_modulus_on(&moved, &Raster::cartesian(-5.4, -6.4, 12.8 / 320.0, 320, 320)).unwrap();
    assert!(a.sandwich_holds() && b.sandwich_holds());
    assert!(rel(a.estimate, b.estimate) < 0.01, "{} vs {}", a.estimate, b.estimate);
}

#[test]
fn square_frame_is_reproducible() {
    let sq = |s: f64| vec![c(-s, -s), c(s, -s), c(s, s), c(-s, s)];
    let region = AnnulusRegion::sampled(sq(1.0), sq(2.0)).unwrap();
    let a = checked(&region, 512);
    let b = checked(&region, 512);
    assert!((a.estimate - b.estimate).abs() < 1e-6);
    // contains the round annulus sqrt(2) < |z| < 2, lies inside 1 < |z| < 2 sqrt(2)
    assert!(a.estimate > 2f64.sqrt().ln() / (2.0 * PI));
    assert!(a.estimate < (2.0 * 2f64.sqrt()).ln() / (2.0 * PI));
}

#[test]
fn touching_boundaries_are_too_coarse() {
    let inner = vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)];
    let outer = vec![c(-1.0, -2.0), c(3.0, -2.0), c(3.0, 2.0), c(-1.0, 2.0)];
    let region = AnnulusRegion::sampled(inner, outer).unwrap();
    assert!(matches!(grid_modulus(&region, 256), Err(ModulusError::GridTooCoarse(_))));
    let nested = AnnulusRegion::round(c(0.0, 0.0), 1.0, 1.0 + 1e-6).unwrap();
    assert!(matches!(grid_modulus(&nested, 64), Err(ModulusError::GridTooCoarse(_))));
}

#[test]
fn bad_regions() {
    assert!(matches!(
        AnnulusRegion::sampled(vec![c(0.0, 0.0), c(1.0, 0.0)], circle(c(0.0, 0.0), 3.0, 8)),
        Err(ModulusError::BadRegion(_))
    ));
    assert!(matches!(
        AnnulusRegion::sampled(circle(c(0.0, 0.0), 4.0, 8), circle(c(0.0, 0.0), 3.0, 8)),
        Err(ModulusError::BadRegion(_))
    ));
    let region = AnnulusRegion::round(c(0.0, 0.0), 1.0, 2.0).unwrap();
    assert_eq!(grid_modulus_about(&region, c(1.5, 0.0), 64).unwrap_err(), ModulusError::BadCenter);
}

#[test]
fn four_sectors_of_a_round_annulus() {
    let region = AnnulusRegion::round(c(0.0, 0.0), 1.0, (2.0 * PI).exp()).unwrap();
    let raster = annulus_raster(&region, c(0.0, 0.0), 512).unwrap();
    let sectors: Vec<QuadRegion> = (0..4)
        .map(|k| QuadRegion::rectangle_radial(0.0, 2.0 * PI, k as f64 * PI / 2.0, (k + 1) as f64 * PI / 2.0))
        .collect();
    let report = verify_quad_annulus_inequality(&region, &raster, &sectors).unwrap();
    for m in &report.quad_moduli {
        assert!(rel(*m, 4.0) < 0.01, "{m}");
    }
    assert!(report.holds && report.margin.abs() < 0.02, "{report:?}");
}

#[test]
fn whole_cut_annulus_as_one_quadrilateral() {
    let region = AnnulusRegion::round(c(0.0, 0.0), 1.0, 3.0).unwrap();
    let raster = annulus_raster(&region, c(0.0, 0.0), 256).unwrap();
    let cut = QuadRegion::rectangle_radial(0.0, 3f64.ln(), 0.0, 2.0 * PI);
    let report = verify_quad_annulus_inequality(&region, &raster, &[cut]).unwrap();
    assert!(report.margin >= -1e-9, "{report:?}");
    assert!(report.holds);
}

#[test]
fn euclidean_quadrants_on_cartesian_raster() {
    let n = 1024;
    let region = AnnulusRegion::sampled(circle(c(0.0, 0.0), 1.0, n), circle(c(0.0, 0.0), 3.0, n)).unwrap();
    let raster = Raster::cartesian(-3.2, -3.2, 6.4 / 384.0, 384, 384);
    let quads: Vec<QuadRegion> = (0..4).map(|q| polygon_quadrant(1.0, 3.0, n, q)).collect();
    let report = verify_quad_annulus_inequality(&region, &raster, &quads).unwrap();
    let quadrant = 4.0 * 3f64.ln() / (2.0 * PI);
    for m in &report.quad_moduli {
        assert!(rel(*m, quadrant) < 0.02, "{m} vs {quadrant}");
    }
    assert!(report.holds, "{report:?}");

    let missing = &quads[..3];
    assert!(matches!(
        verify_quad_annulus_inequality(&region, &raster, missing),
        Err(ModulusError::BadDecomposition(_))
    ));
    let outside = QuadRegion::rectangle_horizontal(2.0, 3.1, -0.5, 0.5);
    assert!(matches!(
        verify_quad_annulus_inequality(&region, &raster, &[quads.clone(), vec![outside]].concat()),
        Err(ModulusError::BadDecomposition(_))
    ));
}

#[test]
fn rectangle_moduli_are_exact() {
    let raster = Raster::cartesian(-0.05, -0.05, 0.01, 320, 120);
    for (w, h) in [(1.0, 1.0), (3.0, 1.0), (0.25, 1.0), (2.0, 0.5)] {
        let est = quad_modulus(&raster, &QuadRegion::rectangle_horizontal(0.0, w, 0.0, h)).unwrap();
        assert!(rel(est.estimate, h / w) < 1e-6, "{w}x{h}: {}", est.estimate);
        assert!(est.sandwich_holds());
    }
}

fn three_quad(q1_right: f64, q3_left: f64, beta1: f64, beta3: f64) -> ThreeQuadConfig {
    ThreeQuadConfig { x0: 0.0, x1: 3.0, y0: 0.0, y1: 1.0, q1_right, q3_left, beta1, beta3 }
}

#[test]
fn three_quadrilaterals_in_a_rectangle() {
    let report = verify_three_quadrilateral_inequality(&three_quad(1.25, 1.75, 1.0, 2.0), 1.0 / 160.0).unwrap();
    // every piece is a rectangle: moduli are height / width
    for (m, exact) in [
        (report.mod_q, 1.0 / 3.0),
        (report.mod_q1, 0.8),
        (report.mod_q2, 1.0),
        (report.mod_q3, 0.8),
        (report.mod_q12, 4.0),
        (report.mod_q23, 4.0),
    ] {
        assert!(rel(m, exact) < 1e-6, "{m} vs {exact}");
    }
    assert!((report.m - 4.0).abs() < 1e-5);
    assert!(report.holds && report.margin > 0.0);
}

#[test]
fn symmetric_three_quadrilaterals() {
    let report = verify_three_quadrilateral_inequality(&three_quad(1.4, 1.6, 0.8, 2.2), 1.0 / 100.0).unwrap();
    assert!((report.mod_q12 - report.mod_q23).abs() < 1e-9);
    assert!(report.margin >= 0.0);
}

#[test]
fn three_quadrilateral_configuration_errors() {
    for cfg in [three_quad(1.25, 1.75, 1.5, 2.0), three_quad(1.8, 1.75, 1.0, 2.0), three_quad(1.25, 1.75, 1.0, 3.5)] {
        assert!(matches!(
            verify_three_quadrilateral_inequality(&cfg, 0.01),
            Err(ModulusError::BadConfiguration(_))
        ));
    }
}

#[test]
fn extraction_of_round_annulus_is_identity() {
    let region = AnnulusRegion::round(c(1.0, 2.0), 0.5, 7.0).unwrap();
    let out = extract_round_annulus(&region, c(1.0, 2.0)).unwrap();
    assert_eq!(out, region);
}

#[test]
fn extraction_errors() {
    let mut inner = circle(c(0.0, 0.0), 1.0, 16);
    inner[3] = c(10.0, 0.5);
    let outer = circle(c(0.0, 0.0), 20.0, 64);
    let mut region = AnnulusRegion::sampled(inner, outer).unwrap();
    if let AnnulusKind::Sampled { outer, .. } = &mut region.kind {
        *outer = circle(c(0.0, 0.0), 5.0, 64);
    }
    assert!(matches!(extract_round_annulus(&region, c(0.0, 0.0)), Err(ModulusError::NoRoundAnnulus { .. })));
    let ok = AnnulusRegion::sampled(circle(c(0.0, 0.0), 1.0, 16), circle(c(0.0, 0.0), 5.0, 16)).unwrap();
    assert_eq!(extract_round_annulus(&ok, c(3.0, 0.0)).unwrap_err(), ModulusError::BadCenter);
}

#[test]
fn ellipse_annulus_extraction() {
    let ellipse = |a: f64, b: f64| -> Vec<Complex64> {
        (0..1024).map(|k| 2.0 * PI * k as f64 / 1024.0).map(|t| c(a * t.cos(), b * t.sin())).collect()
    };
    let region = AnnulusRegion::sampled(ellipse(1.0, 2.0), ellipse(8.0, 9.0)).unwrap();
    let report = extract_round_annulus_report(&region, c(0.0, 0.0), 512).unwrap();
    assert!((report.r1 - 2.0).abs() < 1e-12 && (report.r2 - 8.0).abs() < 1e-3);
    assert!(report.holds);
    // this annulus is thinner than 5 log 2 / (2π), so the bound is vacuous
    assert!(!report.precondition_met);
}

#[test]
fn distorted_annuli_keep_a_round_core() {
    let loss = 5.0 * LN_2 / (2.0 * PI);
    for region in distorted_suite() {
        let report = extract_round_annulus_report(&region, c(0.0, 0.0), 512).unwrap();
        assert!(report.precondition_met, "{report:?}");
        assert!(report.extracted_modulus >= report.input_modulus - loss - LEMMA_SLACK, "{report:?}");
        assert!(report.extracted_modulus <= report.input_modulus);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sandwich_on_wobbly_annuli(
        a in 0.0f64..0.4, k in 1u32..6, b in 0.0f64..0.3, m in 1u32..6,
        ratio in 2.0f64..20.0, shift in -0.2f64..0.2,
    ) {
        let n = 256;
        let th = |j: usize| 2.0 * PI * j as f64 / n as f64;
        let inner = (0..n).map(|j| Complex64::from_polar(1.0 + a * (k as f64 * th(j)).cos(), th(j)) + shift).collect();
        let outer = (0..n)
            .map(|j| Complex64::from_polar(ratio * 1.5 * (1.0 + b * (m as f64 * th(j)).sin()), th(j)))
            .collect();
        let region = AnnulusRegion::sampled(inner, outer).unwrap();
        let est = grid_modulus(&region, 96).unwrap();
        prop_assert!(est.sandwich_holds(), "{} <= {} <= {}", est.lower, est.estimate, est.upper);
    }

    #[test]
    fn grid_matches_round_closed_form(r_in in 0.1f64..2.0, ratio in 1.2f64..50.0, x in -3.0f64..3.0) {
        let region = AnnulusRegion::round(c(x, 0.5 * x), r_in, r_in * ratio).unwrap();
        let est = grid_modulus(&region, 64).unwrap();
        prop_assert!(est.sandwich_holds());
        prop_assert!(rel(est.estimate, round_modulus(r_in, r_in * ratio).unwrap()) < 1e-6);
    }
}
