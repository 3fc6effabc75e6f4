use num_complex::Complex64;
use pinchlab::dynamics::classify;
use pinchlab::parabolic::{abel_residual, build_petal, fatou_coordinate, petal_samples, ParabolicError, Petal};
use pinchlab::{RationalMap, SpherePoint};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mobius_parabolic() -> RationalMap {
    RationalMap::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap()
}

fn z_plus_z2() -> RationalMap {
    RationalMap::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
}

fn petal_at(f: &RationalMap, y: f64, scale: f64) -> Petal {
    let pp = classify(f, &SpherePoint::real(y), 1).unwrap();
    build_petal(f, &pp, scale).unwrap()
}

#[test]
fn cauliflower_petal_opens_to_the_left() {
    let f = RationalMap::quadratic(c(0.25, 0.0));
    let petal = petal_at(&f, 0.5, 0.5);
    assert!((petal.direction - c(-1.0, 0.0)).norm() < 1e-9);
    assert_eq!(petal.sample.len(), 256);
    let (center, radius) = (petal.center(), petal.radius());
    // invariance re-checked by direct iteration of the boundary samples
    for s in &petal.sample {
        let img = f.eval_complex(s.value());
        assert!((img - center).norm() < radius || (img - 0.5).norm() < 1e-8);
    }
}

#[test]
fn petal_shrinks_with_scale() {
    let f = RationalMap::quadratic(c(0.25, 0.0));
    let mut last = f64::INFINITY;
    for scale in [1.0, 0.1, 0.01, 0.001] {
        let petal = petal_at(&f, 0.5, scale);
        assert!(2.0 * petal.radius() < last);
        last = 2.0 * petal.radius();
    }
    assert!(last < 1e-2);
}

#[test]
fn mobius_fatou_coordinate_is_exact() {
    let f = mobius_parabolic();
    let petal = petal_at(&f, 0.0, 0.5);
    for z in petal_samples(&petal, 25) {
        let phi = fatou_coordinate(&f, &petal, &SpherePoint::finite(z), 10).unwrap();
        assert!((phi + 1.0 / z).norm() < 1e-12 * (1.0 / z).norm());
    }
    assert!(abel_residual(&f, &petal, 100).unwrap() < 1e-12);
}

#[test]
fn z_plus_z2_abel_equation() {
    let f = z_plus_z2();
    let petal = petal_at(&f, 0.0, 0.5);
    let z = SpherePoint::real(-0.25);
    let phi = fatou_coordinate(&f, &petal, &z, 100_000).unwrap();
    let phi_next = fatou_coordinate(&f, &petal, &f.eval(&z), 100_000).unwrap();
    assert!((phi_next - phi - 1.0).norm() < 1e-6);
    assert!(abel_residual(&f, &petal, 100).unwrap() < 1e-6);
}

#[test]
fn fatou_coordinate_matches_slow_renormalization() {
    // Oracle without the 1/U correction: U_N - N - log U_N at N = 1e6 has
    // truncation error of order 1/N.
    let f = z_plus_z2();
    let petal = petal_at(&f, 0.0, 0.5);
    for z in [c(-0.25, 0.0), c(-0.2, 0.1), c(-0.4, -0.05)] {
        let phi = fatou_coordinate(&f, &petal, &SpherePoint::finite(z), 100_000).unwrap();
        let mut w = z;
        let n = 1_000_000;
        for _ in 0..n {
            w += w * w;
        }
        let u = -1.0 / w;
        let oracle = u - n as f64 - u.ln();
        assert!((phi - oracle).norm() < 1e-5, "{phi} vs {oracle}");
    }
}

#[test]
fn cauliflower_abel_residual() {
    let f = RationalMap::quadratic(c(0.25, 0.0));
    let petal = petal_at(&f, 0.5, 0.5);
    let z = SpherePoint::real(0.3);
    let phi = fatou_coordinate(&f, &petal, &z, 1_000_000).unwrap();
    let phi_next = fatou_coordinate(&f, &petal, &f.eval(&z), 1_000_000).unwrap();
    assert!((phi_next - phi - 1.0).norm() < 1e-6);
    assert!(abel_residual(&f, &petal, 100).unwrap() < 1e-6);
}

#[test]
fn two_petals_give_coordinates_differing_by_a_constant() {
    let f = RationalMap::quadratic(c(0.25, 0.0));
    let big = petal_at(&f, 0.5, 0.5);
    let small = petal_at(&f, 0.5, 0.25);
    let diffs: Vec<Complex64> = petal_samples(&small, 100)
        .into_iter()
        .map(|z| {
            let p = SpherePoint::finite(z);
            fatou_coordinate(&f, &big, &p, 1_000_000).unwrap() - fatou_coordinate(&f, &small, &p, 1_000_000).unwrap()
        })
        .collect();
    let mean = diffs.iter().sum::<Complex64>() / diffs.len() as f64;
    let var = diffs.iter().map(|d| (d - mean).norm_sqr()).sum::<f64>() / diffs.len() as f64;
    assert!(var.sqrt() < 1e-6);
}

#[test]
fn outside_petal_and_budget_errors() {
    let f = z_plus_z2();
    let petal = petal_at(&f, 0.0, 0.5);
    assert_eq!(
        fatou_coordinate(&f, &petal, &SpherePoint::real(0.25), 100).unwrap_err(),
        ParabolicError::OutsidePetal
    );
    assert!(matches!(
        fatou_coordinate(&f, &petal, &SpherePoint::real(-0.25), 3),
        Err(ParabolicError::SlowConvergence { .. })
    ));
}

#[test]
fn oversized_petal_fails_invariance() {
    // a cubic term pushing boundary points outward breaks the largest petals
    let f = RationalMap::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(8.0, 0.0)]).unwrap();
    let pp = classify(&f, &SpherePoint::ZERO, 1).unwrap();
    assert!(matches!(build_petal(&f, &pp, 1.0), Err(ParabolicError::InvarianceFailure { .. })));
    assert!(build_petal(&f, &pp, 0.05).is_ok());
}
