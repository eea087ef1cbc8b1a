//! `tfdecay`: experiment runner for the time-frequency decay library.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};

use config::{ConfigError, Params, RawConfig, KEYS};

/// `(name, about)` of every subcommand.
const SUBCOMMANDS: &[(&str, &str)] = &[
    ("stft", "STFT of the test signal, with inversion check"),
    ("wigner", "tau-Wigner (or Born-Jordan with route=bj) distribution and marginals"),
    ("frames", "Gabor frame bounds of the window on the lattice"),
    ("matrix", "Gabor matrix of the symbol by the direct, stft, bj or both routes"),
    ("decay", "decay envelope, fitted order and bound constants (route=bj for Born-Jordan)"),
    ("tausweep", "envelope norms across the tau list"),
    ("norms", "modulation and Besov norms over the signal family"),
    ("embed", "embedding suite with reversed controls"),
    ("selftest", "closed-form checks of every module"),
];

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// A numerical contract failed; results were still written.
    Contract(String),
    Io(std::io::Error),
    Core(tfdecay_core::Error),
}

pub type RunResult<T = ()> = Result<T, RunError>;

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Contract(m) => write!(f, "contract violation: {m}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
            RunError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<tfdecay_core::Error> for RunError {
    fn from(e: tfdecay_core::Error) -> Self {
        RunError::Core(e)
    }
}

fn cli() -> Command {
    let mut cmd = Command::new("tfdecay")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Gabor matrices, decay envelopes and modulation norms of tau-quantized operators")
        .subcommand_required(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value configuration file; flags override it"),
        );
    for (key, default, help) in KEYS {
        cmd = cmd.arg(
            Arg::new(*key)
                .long(key.replace('_', "-"))
                .global(true)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .help(format!("{help} [default: {default}]")),
        );
    }
    for (name, about) in SUBCOMMANDS {
        cmd = cmd.subcommand(Command::new(*name).about(*about));
    }
    cmd
}

fn resolve(m: &ArgMatches) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::defaults();
    if let Some(path) = m.get_one::<String>("config") {
        raw.apply_file(Path::new(path))?;
    }
    for (key, _, _) in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            raw.set(key, v)?;
        }
    }
    Ok(raw)
}

fn run(command: &str, m: &ArgMatches) -> RunResult {
    let raw = resolve(m)?;
    let params = Params::from_raw(&raw)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.threads)
        .build()
        .map_err(|e| ConfigError {
            field: "threads".into(),
            message: e.to_string(),
        })?;
    pool.install(|| commands::dispatch(command, &params, &raw))
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (command, sub) = matches.subcommand().expect("subcommand required");
    match run(command, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tfdecay {command}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
