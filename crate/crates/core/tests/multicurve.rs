mod common;

use pinchlab::multicurve::*;
use proptest::prelude::*;

fn load(name: &str) -> CoverData {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn dense_radius(m: &TransitionMatrix) -> f64 {
    common::dense_radius(m.rows())
}

fn lift(target: &str, id: usize, iso: Option<&str>, degree: u32) -> Lift {
    Lift { target_curve: target.into(), preimage_component_id: id, isotopic_to: iso.map(Into::into), degree }
}

#[test]
fn single_curve_examples() {
    let half = build_matrix(&CoverData { curves: vec!["g".into()], lifts: vec![lift("g", 0, Some("g"), 2)] }).unwrap();
    assert_eq!(half.rows(), &[vec![0.5]]);
    let levy = build_matrix(&CoverData { curves: vec!["g".into()], lifts: vec![lift("g", 0, Some("g"), 1)] }).unwrap();
    assert_eq!(levy.rows(), &[vec![1.0]]);
    assert_eq!(verdict(&levy, Context::General).unwrap().verdict, Verdict::BoundaryCase);
    assert_eq!(verdict(&half, Context::General).unwrap().verdict, Verdict::NoObstruction);
}

#[test]
fn two_curve_example_uses_row_equals_isotopy_class() {
    let data = CoverData {
        curves: vec!["a".into(), "b".into()],
        lifts: vec![lift("a", 0, Some("b"), 2), lift("b", 0, Some("a"), 1), lift("b", 1, Some("a"), 2)],
    };
    let m = build_matrix(&data).unwrap();
    assert_eq!(m.entry("b", "a").unwrap(), 0.5);
    assert_eq!(m.entry("a", "b").unwrap(), 1.5);
    assert_eq!(m.entry("a", "a").unwrap(), 0.0);
    // characteristic polynomial x² - 3/4
    assert!((spectral_radius(&m).unwrap() - 0.75f64.sqrt()).abs() < 1e-12);
}

#[test]
fn cover_data_errors() {
    let unknown = CoverData { curves: vec!["a".into()], lifts: vec![lift("a", 0, Some("z"), 1)] };
    assert_eq!(build_matrix(&unknown), Err(MulticurveError::UnknownLabel("z".into())));
    let dup = CoverData { curves: vec!["a".into()], lifts: vec![lift("a", 0, None, 1), lift("a", 0, None, 2)] };
    assert!(matches!(build_matrix(&dup), Err(MulticurveError::DuplicateLift { .. })));
    let zero = CoverData { curves: vec!["a".into()], lifts: vec![lift("a", 0, Some("a"), 0)] };
    assert!(matches!(build_matrix(&zero), Err(MulticurveError::ZeroDegree { .. })));
}

#[test]
fn blocks_of_reducible_matrices() {
    let diag = TransitionMatrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 1.0 / 3.0]]).unwrap();
    assert_eq!(irreducible_blocks(&diag).len(), 2);
    let full = TransitionMatrix::from_rows(vec![vec![0.2, 0.3], vec![0.4, 0.1]]).unwrap();
    assert_eq!(irreducible_blocks(&full).len(), 1);
    let tri = TransitionMatrix::from_rows(vec![vec![0.5, 1.0], vec![0.0, 0.75]]).unwrap();
    let blocks = irreducible_blocks(&tri);
    assert_eq!(blocks.len(), 2);
    let radii: Vec<f64> = blocks.iter().map(|b| spectral_radius(b).unwrap()).collect();
    assert!(radii.contains(&0.5) && radii.contains(&0.75));
    assert_eq!(spectral_radius(&tri).unwrap(), 0.75);
}

#[test]
fn periodic_irreducible_matrix() {
    // a 3-cycle: power iteration without a shift would oscillate forever
    let m = TransitionMatrix::from_rows(vec![vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 0.5], vec![0.25, 0.0, 0.0]]).unwrap();
    assert!((spectral_radius(&m).unwrap() - 0.25f64.cbrt()).abs() < 1e-12);
}

#[test]
fn rational_map_fixtures_respect_mcmullen_bound() {
    for (name, expected) in [("rabbit.json", 0.25f64.cbrt()), ("airplane.json", 0.0), ("cauliflower_mating.json", 1.0)] {
        let m = build_matrix(&load(name)).unwrap();
        let lambda = spectral_radius(&m).unwrap();
        assert!((lambda - expected).abs() < 1e-10, "{name}: {lambda}");
        assert!((lambda - dense_radius(&m)).abs() < 1e-10);
        assert!(lambda <= 1.0 + BOUNDARY_TOL);
        let report = verdict(&m, Context::GeometricallyFiniteWithAccumulation).unwrap();
        assert_ne!(report.verdict, Verdict::Obstruction);
    }
    let mating = verdict(&build_matrix(&load("cauliflower_mating.json")).unwrap(), Context::GeometricallyFiniteWithAccumulation)
        .unwrap();
    assert_eq!(mating.verdict, Verdict::BoundaryCase);
    assert!(mating.notes.iter().any(|n| n.contains("connecting arc")));
    assert!(mating.notes.iter().any(|n| n.contains("Siegel")));
}

#[test]
fn obstruction_notes_cite_the_bound() {
    let m = TransitionMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
    let general = verdict(&m, Context::General).unwrap();
    assert_eq!(general.verdict, Verdict::Obstruction);
    assert!(general.notes.is_empty());
    let gf = verdict(&m, Context::GeometricallyFiniteWithAccumulation).unwrap();
    assert!(gf.notes.iter().any(|n| n.contains("McMullen")));
}

#[test]
fn report_round_trips_through_json() {
    let m = build_matrix(&load("rabbit.json")).unwrap();
    let report = verdict(&m, Context::General).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: VerdictReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

fn matrix_strategy() -> impl Strategy<Value = TransitionMatrix> {
    (1usize..=8).prop_flat_map(|n| {
        proptest::collection::vec(
            prop_oneof![3 => Just(0.0), 1 => Just(1.0), 1 => Just(0.5), 1 => Just(1.0 / 3.0), 1 => 0.0f64..2.0],
            n * n,
        )
        .prop_map(move |v| TransitionMatrix::from_rows(v.chunks(n).map(|r| r.to_vec()).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn power_iteration_matches_dense_eigensolver(m in matrix_strategy()) {
        let lambda = spectral_radius(&m).unwrap();
        let oracle = dense_radius(&m);
        prop_assert!((lambda - oracle).abs() < 1e-10 * oracle.max(1.0), "{lambda} vs {oracle}");
    }

    #[test]
    fn transpose_and_blocks(m in matrix_strategy()) {
        let lambda = spectral_radius(&m).unwrap();
        prop_assert!((lambda - spectral_radius(&m.transpose()).unwrap()).abs() < 1e-10 * lambda.max(1.0));
        let best = irreducible_blocks(&m).iter().map(dense_radius).fold(0.0, f64::max);
        prop_assert!((best - dense_radius(&m)).abs() < 1e-10 * best.max(1.0));
        let again = verdict(&m.scaled(1.0).unwrap(), Context::General).unwrap();
        prop_assert_eq!(again.verdict, classify_lambda(lambda));
    }
}
