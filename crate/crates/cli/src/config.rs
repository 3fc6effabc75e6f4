//! Argument parsing: per-subcommand key tables, `--config` files and
//! validation into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Arg, ArgMatches, Command};
use pinchlab::{Complex64, RationalMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Render,
    Periodic,
    Modulus,
    PinchModel,
    Pinch,
    Obstruct,
    Distort,
    Petal,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::Render,
        Subcommand::Periodic,
        Subcommand::Modulus,
        Subcommand::PinchModel,
        Subcommand::Pinch,
        Subcommand::Obstruct,
        Subcommand::Distort,
        Subcommand::Petal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Render => "render",
            Subcommand::Periodic => "periodic",
            Subcommand::Modulus => "modulus",
            Subcommand::PinchModel => "pinchmodel",
            Subcommand::Pinch => "pinch",
            Subcommand::Obstruct => "obstruct",
            Subcommand::Distort => "distort",
            Subcommand::Petal => "petal",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Subcommand::Render => "Render the Julia set of a rational map",
            Subcommand::Periodic => "List periodic points and critical orbits as CSV",
            Subcommand::Modulus => "Grid modulus of an annulus given by two boundary polylines",
            Subcommand::PinchModel => "Pinching model: modulus-law table and rasters",
            Subcommand::Pinch => "Pinching path in the quadratic family",
            Subcommand::Obstruct => "Transition matrix and obstruction verdict of a multicurve",
            Subcommand::Distort => "Two-point and modulus distortion of a univalent map",
            Subcommand::Petal => "Attracting petal and Fatou coordinate at a parabolic fixed point",
        }
    }

    pub fn keys(self) -> &'static [Key] {
        match self {
            Subcommand::Render => RENDER,
            Subcommand::Periodic => PERIODIC,
            Subcommand::Modulus => MODULUS,
            Subcommand::PinchModel => PINCHMODEL,
            Subcommand::Pinch => PINCH,
            Subcommand::Obstruct => OBSTRUCT,
            Subcommand::Distort => DISTORT,
            Subcommand::Petal => PETAL,
        }
    }
}

/// How a value is checked at parse time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Float,
    Count,
    Seed,
    /// `re,im`
    Complex,
    /// Comma-separated floats.
    FloatList,
    /// `re_min,re_max,im_min,im_max`
    View,
    /// Inline JSON `{"num": ..., "den": ...}` or a path to such a file.
    Map,
    Text,
    Input,
    Output,
}

#[derive(Debug)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub required: bool,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>, required: bool, help: &'static str) -> Key {
    Key { name, kind, default, required, help }
}

const fn req(name: &'static str, kind: Kind, help: &'static str) -> Key {
    key(name, kind, None, true, help)
}

const fn opt(name: &'static str, kind: Kind, help: &'static str) -> Key {
    key(name, kind, None, false, help)
}

const fn def(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Key {
    key(name, kind, Some(default), false, help)
}

const MAP_HELP: &str = "map as JSON {\"num\": [[re,im],...], \"den\": [[re,im],...]} or a path to a JSON file";

const RENDER: &[Key] = &[
    req("map", Kind::Map, MAP_HELP),
    def("width", Kind::Count, "512", "image width in pixels"),
    def("height", Kind::Count, "512", "image height in pixels"),
    def("view", Kind::View, "-2,2,-2,2", "re_min,re_max,im_min,im_max"),
    req("out", Kind::Output, "image path (.png for PNG, PPM otherwise)"),
];

const PERIODIC: &[Key] = &[
    req("map", Kind::Map, MAP_HELP),
    def("period", Kind::Count, "1", "exact period"),
    def("max-iter", Kind::Count, "100000", "critical orbit iteration budget"),
    def("tol", Kind::Float, "1e-10", "critical orbit convergence tolerance"),
    opt("out", Kind::Output, "periodic point CSV (stdout if absent)"),
    opt("orbits", Kind::Output, "critical orbit CSV"),
];

const MODULUS: &[Key] = &[
    req("input", Kind::Input, "polyline CSV with inner then outer loop"),
    def("resolution", Kind::Count, "256", "angular cells of the log-polar raster"),
    opt("center", Kind::Complex, "raster centre re,im"),
    opt("out", Kind::Output, "JSON report (stdout if absent)"),
];

const PINCHMODEL: &[Key] = &[
    req("r", Kind::Float, "outer radius r > 1 of A(r)"),
    req("t", Kind::FloatList, "pinching times, comma-separated"),
    opt("t0", Kind::FloatList, "inner times for the sub-annulus law, comma-separated"),
    def("samples", Kind::Count, "512", "boundary samples per image circle"),
    def("resolution", Kind::Count, "256", "angular cells of the log-polar raster"),
    def("size", Kind::Count, "256", "raster size in pixels"),
    opt("out", Kind::Output, "modulus-law CSV (stdout if absent)"),
    opt("mu-image", Kind::Output, "raster of |mu| at the largest t"),
    opt("annulus-image", Kind::Output, "raster of the image annulus at the largest t"),
];

const PINCH: &[Key] = &[
    def("lambda0", Kind::Complex, "0.25,0", "starting multiplier re,im with 0 < |lambda0| < 1"),
    def("tmax", Kind::Float, "50", "final pinching time"),
    def("steps", Kind::Count, "50", "number of time steps"),
    def("grid", Kind::Count, "10000", "sphere sample size for the sup distance"),
    def("julia", Kind::Count, "10000", "Julia sample size"),
    def("seed", Kind::Seed, "0", "sampling seed"),
    opt("out", Kind::Output, "path table CSV (stdout if absent)"),
    opt("frames", Kind::Output, "directory for per-step Julia frames"),
    def("frame-size", Kind::Count, "256", "frame size in pixels"),
];

const OBSTRUCT: &[Key] = &[
    req("input", Kind::Input, "JSON {curves: [...], lifts: [...]}"),
    def("context", Kind::Text, "general", "general | geometrically_finite_with_accumulation"),
    opt("out", Kind::Output, "JSON verdict (stdout if absent)"),
];

const DISTORT: &[Key] = &[
    opt("map", Kind::Map, MAP_HELP),
    opt("eps", Kind::Float, "use z + eps z^2 on the unit disk instead of --map"),
    def("disk", Kind::FloatList, "0,0,1", "domain disk cx,cy,r"),
    def("pairs", Kind::Count, "10000", "point pairs for the two-point sup"),
    def("configs", Kind::Count, "4", "disk-pair configurations"),
    def("resolution", Kind::Count, "192", "angular cells of the log-polar raster"),
    def("seed", Kind::Seed, "0", "sampling seed"),
    opt("id", Kind::Text, "map identifier for the report"),
    opt("out", Kind::Output, "JSON report (stdout if absent)"),
];

const PETAL: &[Key] = &[
    req("map", Kind::Map, MAP_HELP),
    def("index", Kind::Count, "0", "which parabolic fixed point, in classification order"),
    def("scale", Kind::Float, "0.5", "petal scale in (0, 1]"),
    def("samples", Kind::Count, "100", "petal points in the CSV"),
    opt("out", Kind::Output, "(z, Phi(z)) CSV (stdout if absent)"),
    opt("image", Kind::Output, "raster of the petal with orbit traces"),
    def("width", Kind::Count, "256", "image width in pixels"),
    def("height", Kind::Count, "256", "image height in pixels"),
    def("view", Kind::View, "-2,2,-2,2", "re_min,re_max,im_min,im_max"),
    def("orbit-steps", Kind::Count, "20", "forward steps traced per petal sample"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageError {
    pub message: String,
    /// `--help` or `--version`: print and exit 0.
    pub informational: bool,
}

impl UsageError {
    fn new(message: impl Into<String>) -> Self {
        UsageError { message: message.into(), informational: false }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

/// A validated invocation. Every value has passed its [`Kind`] check, so the
/// typed accessors only fail on programming errors.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub parameters: BTreeMap<String, String>,
    pub output_paths: BTreeMap<String, PathBuf>,
}

impl RunConfig {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.parameters.get(name).map(String::as_str)
    }

    fn value(&self, name: &str) -> &str {
        self.get(name).unwrap_or_else(|| panic!("`{name}` is not set"))
    }

    pub fn float(&self, name: &str) -> f64 {
        parse_float(self.value(name)).expect("validated")
    }

    pub fn count(&self, name: &str) -> usize {
        self.value(name).parse().expect("validated")
    }

    pub fn seed(&self, name: &str) -> u64 {
        self.value(name).parse().expect("validated")
    }

    pub fn complex(&self, name: &str) -> Complex64 {
        parse_complex(self.value(name)).expect("validated")
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        parse_list(self.value(name)).expect("validated")
    }

    pub fn output(&self, name: &str) -> Option<&PathBuf> {
        self.output_paths.get(name)
    }
}

fn parse_float(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_float).collect()
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    match parse_list(s)?.as_slice() {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(format!("`{s}` is not of the form re,im")),
    }
}

/// Inline JSON is decoded here; a file path is only read when the command runs.
pub fn parse_map(s: &str) -> Result<RationalMap, String> {
    serde_json::from_str(s).map_err(|e| format!("bad map JSON: {e}"))
}

fn check(kind: Kind, value: &str) -> Result<(), String> {
    match kind {
        Kind::Float => parse_float(value).map(drop),
        Kind::Count => value.trim().parse::<usize>().map(drop).map_err(|_| format!("`{value}` is not a count")),
        Kind::Seed => value.trim().parse::<u64>().map(drop).map_err(|_| format!("`{value}` is not a seed")),
        Kind::Complex => parse_complex(value).map(drop),
        Kind::FloatList => parse_list(value).map(drop),
        Kind::View => match parse_list(value)?.as_slice() {
            [a, b, c, d] if a < b && c < d => Ok(()),
            _ => Err(format!("`{value}` is not re_min,re_max,im_min,im_max with min < max")),
        },
        Kind::Map if value.trim_start().starts_with('{') => parse_map(value).map(drop),
        Kind::Map | Kind::Text | Kind::Input | Kind::Output => {
            if value.trim().is_empty() {
                Err("empty value".into())
            } else {
                Ok(())
            }
        }
    }
}

/// Flat `key = value` lines; blank lines and lines starting with `#` are
/// skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError::new(format!("config line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(UsageError::new(format!("config line {}: duplicate key `{k}`", i + 1)));
        }
    }
    Ok(out)
}

fn with_keys(mut cmd: Command, keys: &[Key]) -> Command {
    cmd = cmd.arg(Arg::new("config").long("config").value_name("FILE").help("flat key = value file; flags win"));
    for k in keys {
        let mut help = k.help.to_string();
        if let Some(d) = k.default {
            help.push_str(&format!(" [default: {d}]"));
        } else if k.required {
            help.push_str(" [required]");
        }
        // values such as "-0.5,0" must not be taken for flags
        cmd = cmd.arg(Arg::new(k.name).long(k.name).value_name("VALUE").allow_hyphen_values(true).help(help));
    }
    cmd
}

pub fn command() -> Command {
    let mut cmd = Command::new("pinchlab")
        .about("Numerical experiments with pinching deformations of rational maps")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in Subcommand::ALL {
        let base = Command::new(sub.name()).about(sub.about());
        let c = if sub == Subcommand::Pinch {
            base.subcommand_required(true)
                .subcommand(with_keys(Command::new("run").about("Run the path and write the table"), sub.keys()))
        } else {
            with_keys(base, sub.keys())
        };
        cmd = cmd.subcommand(c);
    }
    cmd
}

fn from_matches(sub: Subcommand, m: &ArgMatches) -> Result<RunConfig, UsageError> {
    let keys = sub.keys();
    let mut values = match m.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError::new(format!("cannot read config file {path}: {e}")))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    if let Some(unknown) = values.keys().find(|k| !keys.iter().any(|key| key.name == k.as_str())) {
        return Err(UsageError::new(format!("unknown key `{unknown}` for `{}`", sub.name())));
    }
    for k in keys {
        if m.value_source(k.name) == Some(ValueSource::CommandLine) {
            let v = m.get_one::<String>(k.name).expect("value present");
            values.insert(k.name.to_string(), v.clone());
        }
    }
    let mut parameters = BTreeMap::new();
    let mut output_paths = BTreeMap::new();
    for k in keys {
        let value = match values.remove(k.name) {
            Some(v) => v,
            None => match k.default {
                Some(d) => d.to_string(),
                None if k.required => {
                    return Err(UsageError::new(format!("`{}` requires --{}", sub.name(), k.name)));
                }
                None => continue,
            },
        };
        check(k.kind, &value).map_err(|e| UsageError::new(format!("--{}: {e}", k.name)))?;
        if k.kind == Kind::Output {
            output_paths.insert(k.name.to_string(), PathBuf::from(value));
        } else {
            parameters.insert(k.name.to_string(), value);
        }
    }
    let cfg = RunConfig { subcommand: sub, parameters, output_paths };
    cross_check(&cfg)?;
    Ok(cfg)
}

/// Constraints that involve more than one key.
fn cross_check(cfg: &RunConfig) -> Result<(), UsageError> {
    match cfg.subcommand {
        Subcommand::Distort => {
            if cfg.get("map").is_some() == cfg.get("eps").is_some() {
                return Err(UsageError::new("`distort` needs exactly one of --map and --eps"));
            }
            if cfg.floats("disk").len() != 3 {
                return Err(UsageError::new("--disk: expected cx,cy,r"));
            }
        }
        Subcommand::Obstruct => {
            let c = cfg.value("context");
            if c != "general" && c != "geometrically_finite_with_accumulation" {
                return Err(UsageError::new(format!("--context: unknown context `{c}`")));
            }
        }
        _ => {}
    }
    Ok(())
}

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args = std::iter::once("pinchlab".to_string()).chain(argv.into_iter().map(Into::into));
    let m = command().try_get_matches_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
        UsageError { message: e.render().to_string(), informational }
    })?;
    let (name, sub_m) = m.subcommand().expect("subcommand required");
    let sub = Subcommand::ALL.into_iter().find(|s| s.name() == name).expect("registered subcommand");
    match sub {
        Subcommand::Pinch => {
            let (_, run_m) = sub_m.subcommand().expect("run required");
            from_matches(sub, run_m)
        }
        _ => from_matches(sub, sub_m),
    }
}
