//! Plain-text tables and polyline files.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`.

use num_complex::Complex64;
use std::io::{self, Write};
use thiserror::Error;

use crate::dynamics::{OrbitReport, PeriodicPoint};
use crate::pinch_model::ModulusLawRow;
use crate::pinch_path::PathReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected two loops (inner, outer), found {0}")]
    LoopCount(usize),
}

/// `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A header plus rows of already formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("cells are UTF-8")
    }
}

/// Coordinates of a sphere point for tables: infinity is written as `inf`.
fn coords(p: &crate::SpherePoint) -> (String, String) {
    match p.to_finite() {
        Some(z) => (num(z.re), num(z.im)),
        None => ("inf".into(), "inf".into()),
    }
}

/// One row per point: `re, im, period, |λ|, arg λ, class`.
pub fn periodic_points_table(points: &[PeriodicPoint]) -> CsvTable {
    let mut t = CsvTable::new(&["re", "im", "period", "abs_multiplier", "arg_multiplier", "class"]);
    for p in points {
        let (re, im) = coords(&p.location);
        t.push(vec![
            re,
            im,
            p.period.to_string(),
            num(p.multiplier.norm()),
            num(p.multiplier.arg()),
            p.class.as_str().to_string(),
        ]);
    }
    t
}

/// One row per critical point: its location, what the orbit does, and the
/// limit cycle's period and multiplier when one was found.
pub fn orbit_table(reports: &[OrbitReport]) -> CsvTable {
    let mut t = CsvTable::new(&["re", "im", "status", "iterations", "cycle_period", "abs_multiplier", "decay_exponent"]);
    for r in reports {
        let (re, im) = coords(&r.critical_point);
        let cycle = r.limit_cycle.as_ref().and_then(|c| c.first());
        t.push(vec![
            re,
            im,
            format!("{:?}", r.status).to_lowercase(),
            r.iterations.to_string(),
            cycle.map(|p| p.period.to_string()).unwrap_or_default(),
            cycle.map(|p| num(p.multiplier.norm())).unwrap_or_default(),
            r.decay_exponent.map(num).unwrap_or_default(),
        ]);
    }
    t
}

pub fn path_table(report: &PathReport) -> CsvTable {
    let mut t = CsvTable::new(&[
        "t",
        "lambda_re",
        "lambda_im",
        "c_re",
        "c_im",
        "sup_dist_to_g",
        "sup_bound",
        "julia_hausdorff_to_g",
        "attracting_point_gap",
        "certified_attracting",
    ]);
    for r in &report.rows {
        t.push(vec![
            num(r.t),
            num(r.lambda.re),
            num(r.lambda.im),
            num(r.c.re),
            num(r.c.im),
            num(r.sup_dist_to_g),
            num(r.sup_bound),
            num(r.julia_hausdorff_to_g),
            num(r.attracting_point_gap),
            r.certified_attracting.to_string(),
        ]);
    }
    t
}

pub fn modulus_law_table(rows: &[ModulusLawRow]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "t0", "measured", "closed_form", "predicted"]);
    for r in rows {
        t.push(vec![num(r.t), r.t0.map(num).unwrap_or_default(), num(r.measured), num(r.closed_form), num(r.predicted)]);
    }
    t
}

/// `(z, Φ(z))` pairs.
pub fn fatou_table(pairs: &[(Complex64, Complex64)]) -> CsvTable {
    let mut t = CsvTable::new(&["re", "im", "phi_re", "phi_im"]);
    for (z, phi) in pairs {
        t.push(vec![num(z.re), num(z.im), num(phi.re), num(phi.im)]);
    }
    t
}

/// Closed loops from text with one `x,y` pair per line and blank lines
/// between loops. Lines starting with `#` are comments; a first line that
/// does not parse as numbers is taken as a header.
pub fn read_polylines(text: &str) -> Result<Vec<Vec<Complex64>>, FormatError> {
    let mut loops = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !current.is_empty() {
                loops.push(std::mem::take(&mut current));
            }
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 2 && v.iter().all(|x| x.is_finite()) => current.push(Complex64::new(v[0], v[1])),
            _ if i == 0 => {}
            _ => return Err(FormatError::Parse { line: i + 1, message: format!("expected `x,y`, got `{line}`") }),
        }
    }
    if !current.is_empty() {
        loops.push(current);
    }
    Ok(loops)
}

/// Inner and outer boundary loops of an annulus, in that order.
pub fn read_annulus_loops(text: &str) -> Result<(Vec<Complex64>, Vec<Complex64>), FormatError> {
    let mut loops = read_polylines(text)?;
    if loops.len() != 2 {
        return Err(FormatError::LoopCount(loops.len()));
    }
    let outer = loops.pop().expect("two loops");
    let inner = loops.pop().expect("two loops");
    Ok((inner, outer))
}

/// The inverse of [`read_polylines`].
pub fn write_polylines(loops: &[Vec<Complex64>]) -> String {
    let mut out = String::from("x,y\n");
    for (k, l) in loops.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for z in l {
            out.push_str(&format!("{},{}\n", num(z.re), num(z.im)));
        }
    }
    out
}
