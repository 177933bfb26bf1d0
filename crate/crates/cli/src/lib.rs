//! Command-line front end: configuration merging, experiment dispatch and
//! output writing.

pub mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Arg, ArgAction, Command};
use sha2::{Digest, Sha256};

use config::{config_pairs, emit, parse_config, read_file, ConfigError, Format, RunConfig, KEYS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn command() -> Command {
    let mut cmd = Command::new("hfa")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Hartree-Fock mean-field experiments on disordered lattices")
        .after_help(
            "Every option may also be set in a flat TOML file passed with --config, \
             using the option name as key. Command-line values win.\n\
             HFA_THREADS caps the number of worker threads.",
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("flat TOML configuration file"),
        );
    for key in KEYS {
        cmd = cmd.arg(
            Arg::new(key.name)
                .long(key.name)
                .value_name("VALUE")
                .action(ArgAction::Set)
                .allow_hyphen_values(true)
                .help(key.help),
        );
    }
    cmd
}

/// Hex SHA-256 of the result-relevant configuration.
pub fn run_id(cfg: &RunConfig) -> String {
    let canonical = RunConfig {
        output: None,
        format: Format::Csv,
        ..cfg.clone()
    };
    Sha256::digest(emit(&canonical).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Metadata written ahead of the experiment's own: config echo, version, run id
/// and, last, the timestamp.
pub fn run_metadata(cfg: &RunConfig) -> Vec<(String, String)> {
    let mut meta: Vec<(String, String)> = config_pairs(cfg)
        .into_iter()
        .map(|(k, v)| (format!("config.{k}"), v))
        .collect();
    meta.push(("seed".into(), cfg.spec.seed.to_string()));
    meta.push((
        "version".into(),
        format!("hfa {}", env!("CARGO_PKG_VERSION")),
    ));
    meta.push(("run_id".into(), run_id(cfg)));
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    meta.push(("timestamp_unix".into(), now.to_string()));
    meta
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("HFA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError {
            key: Some("HFA_THREADS".into()),
            message: format!("expected a positive integer, got `{raw}`"),
        })?;
    // A second call in the same process (tests) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn load(args: Vec<OsString>) -> Result<RunConfig, i32> {
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return Err(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    let config_error = |e: ConfigError| {
        eprintln!("hfa: {e}");
        EXIT_CONFIG
    };
    let file = match matches.get_one::<String>("config") {
        Some(path) => {
            let contents = std::fs::read_to_string(path).map_err(|e| {
                eprintln!("hfa: cannot read config file {path}: {e}");
                EXIT_CONFIG
            })?;
            read_file(&contents).map_err(config_error)?
        }
        None => BTreeMap::new(),
    };
    let flags: BTreeMap<String, String> = KEYS
        .iter()
        .filter_map(|k| {
            matches
                .get_one::<String>(k.name)
                .map(|v| (k.name.to_string(), v.clone()))
        })
        .collect();
    configure_threads().map_err(config_error)?;
    parse_config(&file, &flags).map_err(config_error)
}

fn write_output(cfg: &RunConfig, text: &str) -> std::io::Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Runs the CLI with the given arguments (including the program name) and
/// returns the process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let cfg = match load(args) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    let table = match hfa_core::experiments::run(&cfg.spec) {
        Ok(t) => t,
        Err(e) if e.is_configuration() => {
            eprintln!("hfa: invalid config: {e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("hfa: {e}");
            return EXIT_SOLVER;
        }
    };
    let meta = run_metadata(&cfg);
    let text = match cfg.format {
        Format::Csv => table.to_csv(&meta),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json(&meta))
                .expect("tables serialise to JSON");
            s.push('\n');
            s
        }
    };
    if let Err(e) = write_output(&cfg, &text) {
        eprintln!("hfa: cannot write output: {e}");
        return EXIT_SOLVER;
    }
    match table.failure() {
        None => EXIT_OK,
        Some(reason) => {
            eprintln!("hfa: {} failed: {reason}", table.experiment());
            EXIT_SOLVER
        }
    }
}
