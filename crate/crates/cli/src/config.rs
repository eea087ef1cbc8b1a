//! Key-value configuration: defaults, file, flag overrides, validation and hashing.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tfdecay_core::quantization::check_lattice;
use tfdecay_core::signals::{family_member, NORM_FAMILY};
use tfdecay_core::stft::gaussian_window;
use tfdecay_core::symbols::parse_symbol;
use tfdecay_core::{Grid, Lattice, SampledSignal, SymbolSpec};

/// `(key, default, help)`.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("samples", "256", "grid length (power of two, >= 8)"),
    ("dt", "0.0625", "grid spacing"),
    ("window_width", "1", "Gaussian window width"),
    ("signal", "chirp1", "test signal for stft/wigner (a member of the norm family)"),
    ("x_step", "1", "STFT decimation in x"),
    ("padding", "1", "STFT zero-padding factor"),
    ("alpha", "0.5", "lattice step in x"),
    ("beta", "0.5", "lattice step in omega"),
    ("radius", "6", "lattice truncation radius"),
    ("symbol", "bracket_power(1)", "symbol expression"),
    ("tau", "0.5", "quantization parameter in [0, 1]"),
    ("taus", "0,0.25,0.5,0.75,1", "comma-separated tau list for tausweep"),
    ("nodes", "8", "Gauss-Legendre nodes for Born-Jordan"),
    ("route", "direct", "matrix route: direct, stft, bj or both"),
    ("m", "0", "symbol order m"),
    ("n", "4", "derivative order n of the decay bound"),
    ("p", "inf", "inner exponent"),
    ("q", "1", "outer / sequence exponent"),
    ("s", "3", "weight exponent"),
    ("tolerance", "1e-6", "numerical contract tolerance"),
    ("seed", "1", "seed for random families"),
    ("binary", "true", "also write binary dumps"),
    ("out", "tfdecay-out", "output directory"),
    ("threads", "1", "worker threads (0 = all cores)"),
];

/// Keys that do not affect results and are left out of the hash and manifest.
pub const EXECUTION_KEYS: &[&str] = &["out", "threads"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: field `{}`: {}", self.field, self.message)
    }
}

fn err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

/// Raw resolved configuration: every known key with its value.
#[derive(Debug, Clone, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn defaults() -> Self {
        Self {
            values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect(),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !self.values.contains_key(key) {
            return Err(err(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    /// Lines of `key = value`; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| err("config", format!("{}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err("config", format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        &self.values[key]
    }

    /// Result-relevant entries, sorted by key.
    pub fn hashed_entries(&self) -> BTreeMap<String, String> {
        self.values
            .iter()
            .filter(|(k, _)| !EXECUTION_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// SHA-256 over `command\nkey=value\n...` of the hashed entries.
    pub fn hash(&self, command: &str) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(b"\n");
        for (k, v) in self.hashed_entries() {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    Stft,
    BornJordan,
    Both,
}

/// Validated parameters.
#[derive(Debug, Clone)]
pub struct Params {
    pub grid: Grid,
    pub window: SampledSignal,
    pub signal: String,
    pub x_step: usize,
    pub padding: usize,
    pub alpha: f64,
    pub beta: f64,
    pub radius: usize,
    pub symbol: SymbolSpec,
    pub tau: f64,
    pub taus: Vec<f64>,
    pub nodes: usize,
    pub route: Route,
    pub m: f64,
    pub order: usize,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub binary: bool,
    pub out: PathBuf,
    pub threads: usize,
}

fn real(raw: &RawConfig, key: &str) -> Result<f64, ConfigError> {
    let v = raw.get(key);
    let x = match v {
        "inf" | "infinity" => f64::INFINITY,
        _ => v.parse::<f64>().map_err(|_| err(key, format!("`{v}` is not a number")))?,
    };
    if x.is_nan() {
        return Err(err(key, "NaN is not allowed"));
    }
    Ok(x)
}

fn finite(raw: &RawConfig, key: &str) -> Result<f64, ConfigError> {
    let x = real(raw, key)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(err(key, "must be finite"))
    }
}

fn positive(raw: &RawConfig, key: &str) -> Result<f64, ConfigError> {
    let x = real(raw, key)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(err(key, format!("{x} must be positive")))
    }
}

fn integer(raw: &RawConfig, key: &str) -> Result<usize, ConfigError> {
    let v = raw.get(key);
    v.parse::<usize>()
        .map_err(|_| err(key, format!("`{v}` is not a nonnegative integer")))
}

fn unit_interval(key: &str, x: f64) -> Result<f64, ConfigError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(err(key, format!("{x} not in [0, 1]")))
    }
}

/// Whether `v` is an integer multiple of `step` (up to rounding).
fn on_grid(v: f64, step: f64) -> bool {
    let r = v / step;
    (r - r.round()).abs() <= 1e-9 * r.abs().max(1.0)
}

impl Params {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let samples = integer(raw, "samples")?;
        if samples < 8 || !samples.is_power_of_two() {
            return Err(err("samples", format!("{samples} must be a power of two >= 8")));
        }
        let dt = positive(raw, "dt")?;
        let grid = Grid::centered(samples, dt).map_err(|e| err("dt", e.to_string()))?;
        let width = positive(raw, "window_width")?;
        let window = gaussian_window(grid, width).map_err(|e| err("window_width", e.to_string()))?;

        let signal = raw.get("signal").to_string();
        if !NORM_FAMILY.contains(&signal.as_str()) {
            return Err(err("signal", format!("`{signal}` is not one of {}", NORM_FAMILY.join(", "))));
        }
        let x_step = integer(raw, "x_step")?;
        if x_step == 0 || samples % x_step != 0 {
            return Err(err("x_step", format!("{x_step} must divide samples = {samples}")));
        }
        let padding = integer(raw, "padding")?;
        if padding == 0 {
            return Err(err("padding", "must be at least 1"));
        }

        let alpha = positive(raw, "alpha")?;
        let beta = positive(raw, "beta")?;
        let radius = integer(raw, "radius")?;
        if !on_grid(alpha, dt) {
            return Err(err("alpha", format!("{alpha} is not a multiple of dt = {dt}")));
        }
        let lattice = Lattice::new(alpha, beta, radius).map_err(|e| err("radius", e.to_string()))?;
        check_lattice(&lattice, &grid).map_err(|e| err("radius", e.to_string()))?;

        let symbol = parse_symbol(raw.get("symbol")).map_err(|e| err("symbol", e.to_string()))?;
        let tau = unit_interval("tau", finite(raw, "tau")?)?;
        let taus = raw
            .get("taus")
            .split(',')
            .map(|t| {
                let x = t
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| err("taus", format!("`{}` is not a number", t.trim())))?;
                unit_interval("taus", x)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let nodes = integer(raw, "nodes")?;
        if !(1..=256).contains(&nodes) {
            return Err(err("nodes", format!("{nodes} not in 1..=256")));
        }
        let route = match raw.get("route") {
            "direct" => Route::Direct,
            "stft" => Route::Stft,
            "bj" => Route::BornJordan,
            "both" => Route::Both,
            other => return Err(err("route", format!("`{other}` is not one of direct, stft, bj, both"))),
        };
        if matches!(route, Route::Stft | Route::Both) {
            let dw = grid.frequency_grid().spacing();
            if !on_grid(tau * alpha, dt) || !on_grid(tau * beta, dw) || !on_grid(beta, dw) {
                return Err(err(
                    "tau",
                    format!("the STFT route needs tau alpha, beta and tau beta on the grid (dt = {dt}, d omega = {dw})"),
                ));
            }
        }
        let m = finite(raw, "m")?;
        let order = integer(raw, "n")?;
        if order > tfdecay_core::decay::MAX_BOUND_ORDER {
            return Err(err("n", format!("{order} exceeds {}", tfdecay_core::decay::MAX_BOUND_ORDER)));
        }
        let p = positive(raw, "p")?;
        let q = positive(raw, "q")?;
        let s = finite(raw, "s")?;
        let tolerance = positive(raw, "tolerance")?;
        let seed = raw
            .get("seed")
            .parse::<u64>()
            .map_err(|_| err("seed", "not a nonnegative integer"))?;
        let binary = match raw.get("binary") {
            "true" => true,
            "false" => false,
            other => return Err(err("binary", format!("`{other}` is not true or false"))),
        };
        let out = PathBuf::from(raw.get("out"));
        let threads = integer(raw, "threads")?;
        Ok(Self {
            grid,
            window,
            signal,
            x_step,
            padding,
            alpha,
            beta,
            radius,
            symbol,
            tau,
            taus,
            nodes,
            route,
            m,
            order,
            p,
            q,
            s,
            tolerance,
            seed,
            binary,
            out,
            threads,
        })
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.alpha, self.beta, self.radius).expect("validated")
    }

    pub fn test_signal(&self) -> SampledSignal {
        family_member(self.grid, &self.signal).expect("validated signal")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let raw = RawConfig::defaults();
        let p = Params::from_raw(&raw).unwrap();
        assert_eq!(p.grid.len(), 256);
        assert_eq!(p.taus.len(), 5);
    }

    #[test]
    fn diagnostics_name_the_field() {
        for (k, v) in [
            ("samples", "100"),
            ("alpha", "0.3"),
            ("radius", "40"),
            ("symbol", "bracket_power(1"),
            ("tau", "2"),
            ("route", "sideways"),
            ("taus", "0,x"),
            ("q", "0"),
        ] {
            let mut raw = RawConfig::defaults();
            raw.set(k, v).unwrap();
            let e = Params::from_raw(&raw).unwrap_err();
            assert_eq!(e.field, k, "{e}");
        }
        assert_eq!(RawConfig::defaults().set("nope", "1").unwrap_err().field, "nope");
    }

    #[test]
    fn hash_ignores_execution_keys() {
        let a = RawConfig::defaults();
        let mut b = a.clone();
        b.set("threads", "4").unwrap();
        b.set("out", "elsewhere").unwrap();
        assert_eq!(a.hash("stft"), b.hash("stft"));
        assert_ne!(a.hash("stft"), a.hash("wigner"));
        b.set("tau", "0.25").unwrap();
        assert_ne!(a.hash("stft"), b.hash("stft"));
    }
}
