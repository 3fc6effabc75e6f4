use num_complex::Complex64;
use pinchlab::formats::*;
use pinchlab::moduli::AnnulusRegion;
use pinchlab::pinch_model::{beltrami, PinchingModel};
use pinchlab::pinch_path::{run_path, PathConfig};
use pinchlab::render::*;
use pinchlab::{Mobius, RationalMap};

fn quad(c: f64) -> RationalMap {
    RationalMap::quadratic(Complex64::new(c, 0.0))
}

#[test]
fn unit_circle_julia_set() {
    let view = Viewport::square(2.0).unwrap();
    let img = render_julia(&quad(0.0), 256, 256, &view).unwrap();
    let (i, j) = view.pixel_of(Complex64::new(0.0, 0.0), 256, 256).unwrap();
    assert_eq!(img.get(i, j), [0, 0, 0]);
    assert_ne!(img.get(0, 0), [0, 0, 0]);
    // interior pixels are exactly those inside the unit circle (up to one pixel)
    for j in 0..256 {
        for i in 0..256 {
            let r = view.pixel_center(i, j, 256, 256).norm();
            if (r - 1.0).abs() > 2.0 * 4.0 / 256.0 {
                assert_eq!(img.get(i, j) == [0, 0, 0], r < 1.0, "pixel ({i}, {j}) at radius {r}");
            }
        }
    }
}

#[test]
fn renders_are_deterministic_and_written() {
    let dir = tempfile::tempdir().unwrap();
    let view = Viewport::new(-1.6, 1.2, -1.2, 1.2).unwrap();
    let a = dir.path().join("a.ppm");
    let b = dir.path().join("b.ppm");
    for p in [&a, &b] {
        render_julia(&quad(0.25), 200, 160, &view).unwrap().write(p).unwrap();
    }
    let bytes = std::fs::read(&a).unwrap();
    assert!(bytes.len() > 200 * 160 * 3);
    assert_eq!(bytes, std::fs::read(&b).unwrap());

    let png = dir.path().join("c.png");
    render_julia(&quad(0.25), 64, 64, &view).unwrap().write(&png).unwrap();
    assert!(std::fs::read(&png).unwrap().starts_with(b"\x89PNG"));

    let bad = dir.path().join("missing").join("x.ppm");
    assert!(matches!(Image::filled(2, 2, [0, 0, 0]).write(&bad), Err(RenderError::Io(_))));
}

#[test]
fn rational_maps_use_backward_orbit_density() {
    // m(z) = 1/(z - 2) sends the unit circle to |z + 2/3| = 1/3, and the
    // conjugate of z² is no longer a polynomial
    let m = Mobius::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0))
        .unwrap();
    let f = quad(0.0).conjugate_by(&m, &m.inverse()).unwrap();
    assert!(pinchlab::dynamics::escape_radius(&f).is_none());
    let view = Viewport::square(1.0).unwrap();
    let img = render_julia(&f, 64, 64, &view).unwrap();
    let mut marked = 0;
    for j in 0..64 {
        for i in 0..64 {
            if img.get(i, j) != [255, 255, 255] {
                marked += 1;
                let z = view.pixel_center(i, j, 64, 64);
                assert!(((z + 2.0 / 3.0).norm() - 1.0 / 3.0).abs() < 0.05, "{z}");
            }
        }
    }
    assert!(marked > 30);
}

#[test]
fn field_and_region_rasters() {
    let model = PinchingModel::new(4.0, 1.0).unwrap();
    let view = Viewport::square(4.0).unwrap();
    let img = render_field(|z| beltrami(z, &model).ok().map(|mu| mu.norm()), 0.0, 1.0, 128, 128, &view).unwrap();
    // the outer zone is conformal: black
    let (i, j) = view.pixel_of(Complex64::new(3.0, 0.0), 128, 128).unwrap();
    assert_eq!(img.get(i, j), [0, 0, 0]);
    let region = AnnulusRegion::round(Complex64::new(0.0, 0.0), 1.0, 3.0).unwrap();
    let r = render_region(&region, 64, 64, &view).unwrap();
    let (i, j) = view.pixel_of(Complex64::new(2.0, 0.0), 64, 64).unwrap();
    assert_ne!(r.get(i, j), [255, 255, 255]);
    let (i, j) = view.pixel_of(Complex64::new(0.0, 0.1), 64, 64).unwrap();
    assert_eq!(r.get(i, j), [255, 255, 255]);
}

#[test]
fn path_table_round_trips_numbers() {
    let report = run_path(&PathConfig::evenly_spaced(Complex64::new(0.25, 0.0), 4.0, 4, 100, 100, 0)).unwrap();
    let text = path_table(&report).to_csv_string();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("t,lambda_re"));
    for (line, row) in lines[1..].iter().zip(&report.rows) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3].parse::<f64>().unwrap(), row.c.re);
        assert_eq!(cells[7].parse::<f64>().unwrap(), row.julia_hausdorff_to_g);
    }
}
