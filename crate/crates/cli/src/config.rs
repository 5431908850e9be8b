//! Run configuration: flags override `key=value` lines from `--config`,
//! which override built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bos_core::{Method, RightEnd};
use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceGate {
    Advisory,
    Hard,
}

/// Flags shared by every subcommand. All are optional so that a config file
/// can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Comma-separated values of epsilon in (0, 2).
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    /// Largest eigenvalue index (or number of terms for recurrence-dump).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated window exponents m, with windows starting at 10^-m.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
    /// Comma-separated methods: shooting, fd, recurrence.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<String>>,
    /// Target accuracy of each eigenvalue.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of key=value lines; keys are the long flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub trace_gate: Option<TraceGate>,
    /// Right end of each window: limit (pushed to x -> 1) or truncated (1 - 10^-m).
    #[arg(long)]
    pub right_end: Option<String>,
    /// Slack in the asymptotic upper envelope.
    #[arg(long)]
    pub nu: Option<f64>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub epsilon: Vec<f64>,
    pub n_max: usize,
    pub ms: Vec<u32>,
    pub methods: Vec<Method>,
    pub tol: f64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub trace_gate: TraceGate,
    pub right_end: RightEnd,
    pub nu: f64,
}

/// Defaults that differ between subcommands.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub epsilon: Vec<f64>,
    pub n_max: usize,
    pub ms: Vec<u32>,
    pub tol: f64,
}

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// `key = value` per line; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError(format!("line {}: unknown key '{key}'", i + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

const KEYS: &[&str] = &["epsilon", "n", "m", "method", "tol", "format", "out", "trace-gate", "right-end", "nu"];

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| ConfigError(format!("{key}: cannot parse '{s}'"))))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse::<T>().map_err(|_| ConfigError(format!("{key}: cannot parse '{v}'")))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, ConfigError> {
    T::from_str(v.trim(), true).map_err(|_| ConfigError(format!("{key}: unknown value '{v}'")))
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>, ConfigError> {
    let mut out = Vec::new();
    for name in names {
        let m = name.trim().parse::<Method>().map_err(|e| ConfigError(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, defaults: &Defaults) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(p) => parse_config_file(p)?,
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k).map(String::as_str);

        let epsilon = match (&args.epsilon, get("epsilon")) {
            (Some(v), _) => v.clone(),
            (None, Some(v)) => parse_list("epsilon", v)?,
            (None, None) => defaults.epsilon.clone(),
        };
        let n_max = match (args.n, get("n")) {
            (Some(v), _) => v,
            (None, Some(v)) => parse_one("n", v)?,
            (None, None) => defaults.n_max,
        };
        let ms = match (&args.m, get("m")) {
            (Some(v), _) => v.clone(),
            (None, Some(v)) => parse_list("m", v)?,
            (None, None) => defaults.ms.clone(),
        };
        let methods = match (&args.method, get("method")) {
            (Some(v), _) => parse_methods(v)?,
            (None, Some(v)) => parse_methods(&parse_list::<String>("method", v)?)?,
            (None, None) => vec![Method::Shooting],
        };
        let tol = match (args.tol, get("tol")) {
            (Some(v), _) => v,
            (None, Some(v)) => parse_one("tol", v)?,
            (None, None) => defaults.tol,
        };
        let format = match (args.format, get("format")) {
            (Some(v), _) => v,
            (None, Some(v)) => parse_enum("format", v)?,
            (None, None) => Format::Csv,
        };
        let out = args.out.clone().or_else(|| get("out").map(PathBuf::from));
        let trace_gate = match (args.trace_gate, get("trace-gate")) {
            (Some(v), _) => v,
            (None, Some(v)) => parse_enum("trace-gate", v)?,
            (None, None) => TraceGate::Advisory,
        };
        let right_end = match args.right_end.as_deref().or(get("right-end")) {
            Some(v) => v.parse::<RightEnd>().map_err(|e| ConfigError(e.to_string()))?,
            None => RightEnd::Limit,
        };
        let nu = match (args.nu, get("nu")) {
            (Some(v), _) => v,
            (None, Some(v)) => parse_one("nu", v)?,
            (None, None) => bos_core::asymptotics::DEFAULT_NU,
        };

        let cfg = Self {
            epsilon,
            n_max,
            ms,
            methods,
            tol,
            format,
            out,
            trace_gate,
            right_end,
            nu,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.epsilon.is_empty() || self.epsilon.iter().any(|&e| !(e > 0.0 && e < 2.0)) {
            return Err(ConfigError(format!("epsilon must lie in (0, 2): {:?}", self.epsilon)));
        }
        if self.n_max == 0 {
            return Err(ConfigError("n must be at least 1".into()));
        }
        if self.ms.is_empty() || self.ms.iter().any(|&m| m == 0 || m > 15) {
            return Err(ConfigError(format!("m must lie in 1..=15: {:?}", self.ms)));
        }
        if self.methods.is_empty() {
            return Err(ConfigError("at least one method is required".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ConfigError(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.nu > 0.0) {
            return Err(ConfigError(format!("nu must be positive, got {}", self.nu)));
        }
        Ok(())
    }
}
