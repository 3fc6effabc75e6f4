//! One function per subcommand. Tables and reports go to the `out` path when
//! given and to `stdout` otherwise.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context as _, Result};
use pinchlab::distortion::{delta_bound, distortion_report, UnivalentSample, GRID_SLACK};
use pinchlab::dynamics::{periodic_points, postcritical_orbit, PointClass};
use pinchlab::formats::{fatou_table, modulus_law_table, orbit_table, path_table, periodic_points_table, read_annulus_loops, CsvTable};
use pinchlab::moduli::{grid_modulus_about, AnnulusRegion, Boundary};
use pinchlab::multicurve::{build_matrix, verdict, Context, CoverData};
use pinchlab::parabolic::{build_petal, fatou_coordinate, petal_samples, DEFAULT_TERMS};
use pinchlab::pinch_model::{beltrami, image_region, modulus_law_row, PinchingModel};
use pinchlab::pinch_path::{run_path, PathConfig};
use pinchlab::render::{render_field, render_julia, render_petal, render_region, Viewport};
use pinchlab::{Complex64, RationalMap, SpherePoint};
use serde_json::json;

use crate::config::{parse_map, RunConfig, Subcommand};

pub fn execute(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    match cfg.subcommand {
        Subcommand::Render => render(cfg),
        Subcommand::Periodic => periodic(cfg, stdout),
        Subcommand::Modulus => modulus(cfg, stdout),
        Subcommand::PinchModel => pinchmodel(cfg, stdout),
        Subcommand::Pinch => pinch_run(cfg, stdout),
        Subcommand::Obstruct => obstruct(cfg, stdout),
        Subcommand::Distort => distort(cfg, stdout),
        Subcommand::Petal => petal(cfg, stdout),
    }
}

fn load_map(value: &str) -> Result<RationalMap> {
    let text = if value.trim_start().starts_with('{') {
        value.to_string()
    } else {
        std::fs::read_to_string(value).with_context(|| format!("reading map file {value}"))?
    };
    parse_map(&text).map_err(|e| anyhow!("{value}: {e}"))
}

fn emit(cfg: &RunConfig, key: &str, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match cfg.output(key) {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(bytes).context("writing to stdout"),
    }
}

fn emit_csv(cfg: &RunConfig, key: &str, stdout: &mut dyn Write, table: &CsvTable) -> Result<()> {
    emit(cfg, key, stdout, table.to_csv_string().as_bytes())
}

fn emit_json(cfg: &RunConfig, stdout: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(cfg, "out", stdout, text.as_bytes())
}

fn viewport(cfg: &RunConfig) -> Result<Viewport> {
    let v = cfg.floats("view");
    Ok(Viewport::new(v[0], v[1], v[2], v[3])?)
}

fn write_image(image: &pinchlab::render::Image, path: &Path) -> Result<()> {
    image.write(path).with_context(|| format!("writing {}", path.display()))
}

fn render(cfg: &RunConfig) -> Result<()> {
    let map = load_map(cfg.get("map").expect("required"))?;
    let image = render_julia(&map, cfg.count("width"), cfg.count("height"), &viewport(cfg)?)?;
    write_image(&image, cfg.output("out").expect("required"))
}

fn periodic(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let map = load_map(cfg.get("map").expect("required"))?;
    let points = periodic_points(&map, cfg.count("period"))?;
    emit_csv(cfg, "out", stdout, &periodic_points_table(&points))?;
    if cfg.output("orbits").is_some() {
        let reports = postcritical_orbit(&map, cfg.count("max-iter"), cfg.float("tol"))?;
        emit_csv(cfg, "orbits", stdout, &orbit_table(&reports))?;
    }
    Ok(())
}

fn modulus(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let path = cfg.get("input").expect("required");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let (inner, outer) = read_annulus_loops(&text).with_context(|| format!("parsing {path}"))?;
    let (n_inner, n_outer) = (inner.len(), outer.len());
    let region = AnnulusRegion::sampled(inner, outer)?;
    let center = match cfg.get("center") {
        Some(_) => cfg.complex("center"),
        None => region.default_center()?,
    };
    let est = grid_modulus_about(&region, center, cfg.count("resolution"))?;
    let report = json!({
        "inner_vertices": n_inner,
        "outer_vertices": n_outer,
        "center": [center.re, center.im],
        "modulus": est.estimate,
        "lower": est.lower,
        "upper": est.upper,
        "sandwich_holds": est.sandwich_holds(),
        "lower_margin": est.estimate - est.lower,
        "upper_margin": est.upper - est.estimate,
        "energy": est.energy,
        "active_nodes": est.active_nodes,
        "cg_iterations": est.iterations,
    });
    emit_json(cfg, stdout, &report)
}

fn pinchmodel(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let r = cfg.float("r");
    let ts = cfg.floats("t");
    let t0s = cfg.get("t0").map(|_| cfg.floats("t0")).unwrap_or_default();
    let (samples, resolution) = (cfg.count("samples"), cfg.count("resolution"));
    let mut rows = Vec::new();
    for &t in &ts {
        rows.push(modulus_law_row(r, t, None, samples, resolution)?);
        for &t0 in t0s.iter().filter(|&&t0| t0 <= t) {
            rows.push(modulus_law_row(r, t, Some(t0), samples, resolution)?);
        }
    }
    emit_csv(cfg, "out", stdout, &modulus_law_table(&rows))?;

    let t_max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let model = PinchingModel::new(r, t_max)?;
    let size = cfg.count("size");
    if let Some(path) = cfg.output("mu-image") {
        let view = Viewport::square(1.05 * r)?;
        let image = render_field(|z| beltrami(z, &model).ok().map(|mu| mu.norm()), 0.0, 1.0, size, size, &view)?;
        write_image(&image, path)?;
    }
    if let Some(path) = cfg.output("annulus-image") {
        let l = model.log_r();
        let region = image_region(&model, -l, l, samples)?;
        let view = Viewport::square(1.05 * ((1.0 + t_max) * l).exp())?;
        write_image(&render_region(&region, size, size, &view)?, path)?;
    }
    Ok(())
}

fn pinch_run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let config = PathConfig::evenly_spaced(
        cfg.complex("lambda0"),
        cfg.float("tmax"),
        cfg.count("steps"),
        cfg.count("grid"),
        cfg.count("julia"),
        cfg.seed("seed"),
    );
    let report = run_path(&config)?;
    emit_csv(cfg, "out", stdout, &path_table(&report))?;
    if let Some(dir) = cfg.output("frames") {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let size = cfg.count("frame-size");
        let view = Viewport::square(2.0)?;
        for (k, row) in report.rows.iter().enumerate() {
            let image = render_julia(&RationalMap::quadratic(row.c), size, size, &view)?;
            write_image(&image, &dir.join(format!("frame_{k:04}.ppm")))?;
        }
    }
    let v = &report.verdicts;
    eprintln!(
        "{} (sup tail decreasing: {}, julia tail decreasing: {}, gap tail decreasing: {}, final sup small: {})",
        if v.pass { "PASS" } else { "FAIL" },
        v.sup_tail_decreasing,
        v.julia_tail_decreasing,
        v.gap_tail_decreasing,
        v.final_sup_small
    );
    Ok(())
}

fn obstruct(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let path = cfg.get("input").expect("required");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let data: CoverData = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
    let context: Context = serde_json::from_value(json!(cfg.get("context").expect("defaulted")))?;
    let matrix = build_matrix(&data)?;
    let report = verdict(&matrix, context)?;
    let mut value = serde_json::to_value(&report)?;
    value["curves"] = json!(matrix.labels());
    value["matrix"] = json!(matrix.rows());
    emit_json(cfg, stdout, &value)
}

fn distort(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let mut eps = None;
    let (sample, default_id) = match cfg.get("map") {
        Some(m) => {
            let d = cfg.floats("disk");
            if d[2].is_nan() || d[2] <= 0.0 {
                bail!("--disk radius must be positive");
            }
            let domain = vec![Boundary::Circle { center: Complex64::new(d[0], d[1]), radius: d[2] }];
            (UnivalentSample::new(load_map(m)?, domain)?, "map".to_string())
        }
        None => {
            let e = cfg.float("eps");
            eps = Some(e);
            (UnivalentSample::perturbed_identity(e)?, format!("z+{e}z^2"))
        }
    };
    let id = cfg.get("id").map(str::to_string).unwrap_or(default_id);
    let report = distortion_report(
        &id,
        &sample,
        cfg.count("pairs"),
        cfg.count("configs"),
        cfg.seed("seed"),
        cfg.count("resolution"),
    )?;
    let mut value = serde_json::to_value(&report)?;
    // the sampled D0 only bounds the sup from below; for z + εz² the
    // analytic bound on D0 gives a conclusive check
    if let Some(e) = eps {
        let bound = 2.0 * PI * delta_bound(e);
        value["delta_bound"] = json!(delta_bound(e));
        value["pass_delta_bound"] = json!(report.d1_sup <= bound + GRID_SLACK);
    }
    emit_json(cfg, stdout, &value)
}

fn petal(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let map = load_map(cfg.get("map").expect("required"))?;
    let parabolic: Vec<_> = periodic_points(&map, 1)?.into_iter().filter(|p| p.class == PointClass::Parabolic).collect();
    let index = cfg.count("index");
    let pp = parabolic
        .get(index)
        .ok_or_else(|| anyhow!("map has {} parabolic fixed points, asked for index {index}", parabolic.len()))?;
    let petal = build_petal(&map, pp, cfg.float("scale"))?;
    let pairs = petal_samples(&petal, cfg.count("samples"))
        .into_iter()
        .map(|z| Ok((z, fatou_coordinate(&map, &petal, &SpherePoint::finite(z), DEFAULT_TERMS)?)))
        .collect::<Result<Vec<_>>>()?;
    emit_csv(cfg, "out", stdout, &fatou_table(&pairs))?;
    if let Some(path) = cfg.output("image") {
        let image = render_petal(&map, &petal, cfg.count("orbit-steps"), cfg.count("width"), cfg.count("height"), &viewport(cfg)?)?;
        write_image(&image, path)?;
    }
    Ok(())
}
