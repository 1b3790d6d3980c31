//! `key = value` configuration file. Flags override file values; the file
//! path is `endonet.conf` in the working directory unless `ENDONET_CONFIG`
//! names another one.

use std::path::{Path, PathBuf};

pub const ENV_VAR: &str = "ENDONET_CONFIG";
pub const DEFAULT_FILE: &str = "endonet.conf";

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Cone enumeration budget for the strong endotacticity sweep.
    pub budget: usize,
    /// State budget for drift scans.
    pub scan_budget: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub rng: String,
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: endonet::endotactic::DEFAULT_BUDGET,
            scan_budget: endonet::stochastic::DEFAULT_SCAN_BUDGET,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            rng: "chacha8".into(),
            threads: None,
        }
    }
}

pub const SUPPORTED_RNG: &[&str] = &["chacha8"];

impl Config {
    pub fn path() -> Option<PathBuf> {
        match std::env::var_os(ENV_VAR) {
            Some(p) => Some(PathBuf::from(p)),
            None => {
                let p = PathBuf::from(DEFAULT_FILE);
                p.exists().then_some(p)
            }
        }
    }

    /// Reads the configured file, or defaults when there is none.
    pub fn load() -> Result<Config, String> {
        match Config::path() {
            Some(p) => Config::from_file(&p),
            None => Ok(Config::default()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut cfg = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || format!("line {}: invalid value for {key}: {value}", n + 1);
            match key {
                "budget" => cfg.budget = value.parse().map_err(|_| bad())?,
                "scan_budget" => cfg.scan_budget = value.parse().map_err(|_| bad())?,
                "rel_tol" => cfg.rel_tol = value.parse().map_err(|_| bad())?,
                "abs_tol" => cfg.abs_tol = value.parse().map_err(|_| bad())?,
                "threads" => cfg.threads = Some(value.parse().map_err(|_| bad())?),
                "rng" => {
                    if !SUPPORTED_RNG.contains(&value) {
                        return Err(format!("line {}: unsupported rng {value}", n + 1));
                    }
                    cfg.rng = value.to_string();
                }
                _ => return Err(format!("line {}: unknown key {key}", n + 1)),
            }
        }
        for (name, v) in [("rel_tol", cfg.rel_tol), ("abs_tol", cfg.abs_tol)] {
            if !(v > 0.0) {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(cfg)
    }
}
