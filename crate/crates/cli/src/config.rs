use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use hfa_core::experiments::ExperimentSpec;
use hfa_core::scf::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Text,
    Integer,
    Real,
    RealList,
    Flag,
}

/// A configuration key. Flags and file keys share the same names.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, help: &'static str) -> Key {
    Key { name, kind, help }
}

pub const KEYS: &[Key] = &[
    key(
        "experiment",
        Kind::Text,
        "converge | locality | wegner | localisation | gap-closing | sweep-periodic | multiscale-probe | verify",
    ),
    key("xi", Kind::Real, "checkerboard amplitude [default: 1]"),
    key("w", Kind::Real, "disorder width, V_omega ~ U[0, w] [default: 1]"),
    key("q", Kind::Real, "interaction strength [default: 2]"),
    key("L", Kind::Integer, "side length of the lattice [default: 500]"),
    key("d", Kind::Integer, "lattice dimension [default: 1]"),
    key("filling", Kind::Text, "half | quarter | particle count [default: half]"),
    key("mu", Kind::Text, "aufbau | mid-gap | fixed value [default: aufbau]"),
    key("seed", Kind::Integer, "disorder seed [default: 0]"),
    key("samples", Kind::Integer, "ensemble size [default: 100]"),
    key("tol", Kind::Real, "residual tolerance in operator norm [default: 1e-10]"),
    key("max-iter", Kind::Integer, "iteration cap [default: 500]"),
    key(
        "algorithm",
        Kind::Text,
        "fixed-point | oda | fixed-point-then-oda [default: fixed-point-then-oda]",
    ),
    key("output", Kind::Text, "output file [default: stdout]"),
    key("format", Kind::Text, "csv | json [default: csv]"),
    key("site", Kind::Integer, "locality: perturbed site [default: centre]"),
    key("amplitude", Kind::Real, "locality: perturbation amplitude [default: 1]"),
    key("lambda0", Kind::Real, "wegner: lower window edge [default: 2]"),
    key("epsilons", Kind::RealList, "wegner: comma-separated window widths"),
    key("xi-values", Kind::RealList, "sweep-periodic: comma-separated amplitudes"),
    key("radius", Kind::Integer, "multiscale-probe: box radius [default: 10]"),
    key("zeta-box", Kind::Real, "multiscale-probe: decay rate for good boxes [default: 0.25]"),
    key("lambda", Kind::Real, "multiscale-probe: probe energy [default: 2]"),
    key("trunc-d", Kind::Real, "multiscale-probe: truncation constant D [default: 0]"),
    key("trunc-nu", Kind::Real, "multiscale-probe: truncation rate nu [default: 1]"),
    key("calibrate", Kind::Flag, "multiscale-probe: fit D and nu first [default: false]"),
    key("rotations", Kind::Integer, "verify: number of sampled rotations [default: 20]"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: ExperimentSpec,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "invalid config key `{k}`: {}", self.message),
            None => write!(f, "invalid config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: Some(key.into()),
        message: message.into(),
    }
}

fn unknown_key(name: &str) -> ConfigError {
    let message = if name.eq_ignore_ascii_case("zeta") {
        "unknown key; for the disorder width use `w` (zeta is reserved for decay rates, see `zeta-box`)".to_string()
    } else {
        let nearest = KEYS
            .iter()
            .map(|k| (strsim::levenshtein(name, k.name), k.name))
            .min()
            .filter(|(dist, _)| *dist <= 2);
        match nearest {
            Some((_, k)) => format!("unknown key; did you mean `{k}`?"),
            None => "unknown key".to_string(),
        }
    };
    bad(name, message)
}

pub fn lookup(name: &str) -> Option<&'static Key> {
    KEYS.iter().find(|k| k.name == name)
}

fn text_of(name: &str, value: &toml::Value) -> Result<String, ConfigError> {
    use toml::Value;
    Ok(match value {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(x) => format!("{x:?}"),
        Value::Boolean(b) => b.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|v| text_of(name, v))
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        _ => return Err(bad(name, "expected a scalar or an array of numbers")),
    })
}

/// Parses a flat TOML document into raw key/value strings.
pub fn read_file(contents: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let table: toml::Table = contents.parse().map_err(|e: toml::de::Error| ConfigError {
        key: None,
        message: e.message().to_string(),
    })?;
    let mut out = BTreeMap::new();
    for (name, value) in &table {
        if lookup(name).is_none() {
            return Err(unknown_key(name));
        }
        out.insert(name.clone(), text_of(name, value)?);
    }
    Ok(out)
}

fn real(name: &str, s: &str) -> Result<f64, ConfigError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(name, format!("expected a finite number, got `{s}`")))
}

fn integer<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, ConfigError> {
    s.trim()
        .parse()
        .map_err(|_| bad(name, format!("expected a non-negative integer, got `{s}`")))
}

fn reals(name: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',').map(|x| real(name, x)).collect()
}

fn algorithm_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::FixedPoint => "fixed-point",
        Algorithm::Oda => "oda",
        Algorithm::FixedPointThenOda => "fixed-point-then-oda",
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, ConfigError> {
    match s {
        "fixed-point" => Ok(Algorithm::FixedPoint),
        "oda" => Ok(Algorithm::Oda),
        "fixed-point-then-oda" => Ok(Algorithm::FixedPointThenOda),
        other => Err(bad(
            "algorithm",
            format!("expected fixed-point, oda or fixed-point-then-oda, got `{other}`"),
        )),
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Merges file values with flag overrides (flags win) and validates the result.
pub fn parse_config(
    file: &BTreeMap<String, String>,
    flags: &BTreeMap<String, String>,
) -> Result<RunConfig, ConfigError> {
    let mut merged = file.clone();
    for (k, v) in flags {
        if lookup(k).is_none() {
            return Err(unknown_key(k));
        }
        merged.insert(k.clone(), v.clone());
    }
    let mut cfg = RunConfig {
        spec: ExperimentSpec::default(),
        output: None,
        format: Format::Csv,
    };
    if !merged.contains_key("experiment") {
        return Err(bad("experiment", "required"));
    }
    for (k, v) in &merged {
        let s = &mut cfg.spec;
        let v = v.as_str();
        match k.as_str() {
            "experiment" => {
                s.experiment = v.parse().map_err(|e: String| bad(k, e))?;
            }
            "xi" => s.xi = real(k, v)?,
            "w" => s.w = real(k, v)?,
            "q" => s.q = real(k, v)?,
            "L" => s.length = integer(k, v)?,
            "d" => s.dimension = integer(k, v)?,
            "filling" => s.filling = v.parse().map_err(|e: String| bad(k, e))?,
            "mu" => s.mu = v.parse().map_err(|e: String| bad(k, e))?,
            "seed" => s.seed = integer(k, v)?,
            "samples" => s.samples = integer(k, v)?,
            "tol" => s.tol = real(k, v)?,
            "max-iter" => s.max_iter = integer(k, v)?,
            "algorithm" => s.algorithm = parse_algorithm(v)?,
            "output" => cfg.output = Some(PathBuf::from(v)),
            "format" => {
                cfg.format = match v {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => return Err(bad(k, format!("expected csv or json, got `{other}`"))),
                }
            }
            "site" => s.knobs.site = Some(integer(k, v)?),
            "amplitude" => s.knobs.amplitude = real(k, v)?,
            "lambda0" => s.knobs.lambda0 = real(k, v)?,
            "epsilons" => s.knobs.epsilons = reals(k, v)?,
            "xi-values" => s.knobs.xi_values = reals(k, v)?,
            "radius" => s.knobs.radius = integer(k, v)?,
            "zeta-box" => s.knobs.zeta_box = real(k, v)?,
            "lambda" => s.knobs.lambda = real(k, v)?,
            "trunc-d" => s.knobs.trunc_d = real(k, v)?,
            "trunc-nu" => s.knobs.trunc_nu = real(k, v)?,
            "calibrate" => {
                s.knobs.calibrate = v
                    .parse()
                    .map_err(|_| bad(k, format!("expected true or false, got `{v}`")))?
            }
            "rotations" => s.knobs.rotations = integer(k, v)?,
            other => return Err(unknown_key(other)),
        }
    }
    cfg.spec.validate().map_err(|e| {
        let key = match &e {
            hfa_core::Error::InvalidParameter { name, .. } => Some(name.to_string()),
            hfa_core::Error::InvalidFilling { .. } => Some("filling".into()),
            _ => None,
        };
        ConfigError {
            key,
            message: e.to_string(),
        }
    })?;
    Ok(cfg)
}

/// Canonical `key = value` strings for every key that has a value.
pub fn config_pairs(cfg: &RunConfig) -> Vec<(&'static str, String)> {
    let s = &cfg.spec;
    let k = &s.knobs;
    let mut out = vec![
        ("experiment", s.experiment.name().to_string()),
        ("xi", format!("{:?}", s.xi)),
        ("w", format!("{:?}", s.w)),
        ("q", format!("{:?}", s.q)),
        ("L", s.length.to_string()),
        ("d", s.dimension.to_string()),
        ("filling", s.filling.to_string()),
        ("mu", s.mu.to_string()),
        ("seed", s.seed.to_string()),
        ("samples", s.samples.to_string()),
        ("tol", format!("{:?}", s.tol)),
        ("max-iter", s.max_iter.to_string()),
        ("algorithm", algorithm_name(s.algorithm).to_string()),
    ];
    if let Some(path) = &cfg.output {
        out.push(("output", path.display().to_string()));
    }
    out.push((
        "format",
        match cfg.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
        .to_string(),
    ));
    if let Some(site) = k.site {
        out.push(("site", site.to_string()));
    }
    out.extend([
        ("amplitude", format!("{:?}", k.amplitude)),
        ("lambda0", format!("{:?}", k.lambda0)),
        ("epsilons", join(&k.epsilons)),
        ("xi-values", join(&k.xi_values)),
        ("radius", k.radius.to_string()),
        ("zeta-box", format!("{:?}", k.zeta_box)),
        ("lambda", format!("{:?}", k.lambda)),
        ("trunc-d", format!("{:?}", k.trunc_d)),
        ("trunc-nu", format!("{:?}", k.trunc_nu)),
        ("calibrate", k.calibrate.to_string()),
        ("rotations", k.rotations.to_string()),
    ]);
    out
}

/// The configuration as a flat TOML document accepted by [`read_file`].
pub fn emit(cfg: &RunConfig) -> String {
    use toml::Value;
    let mut table = toml::Table::new();
    for (name, text) in config_pairs(cfg) {
        let value = match lookup(name).map(|k| k.kind) {
            Some(Kind::Real) => Value::Float(text.parse().unwrap()),
            Some(Kind::RealList) => Value::Array(
                text.split(',')
                    .map(|x| Value::Float(x.parse().unwrap()))
                    .collect(),
            ),
            Some(Kind::Flag) => Value::Boolean(text == "true"),
            Some(Kind::Integer) => match text.parse::<i64>() {
                Ok(i) => Value::Integer(i),
                Err(_) => Value::String(text),
            },
            _ => Value::String(text),
        };
        table.insert(name.to_string(), value);
    }
    toml::to_string(&table).expect("flat tables always serialise")
}
