//! Run configuration: `key = value` files merged with command-line flags
//! (flags win). Unknown keys are rejected, every numeric option is
//! range-checked, and usage problems are distinguished from domain errors
//! by exit code.

use std::collections::BTreeMap;
use std::path::PathBuf;

/// A usage error: malformed invocation, unknown key, out-of-range value.
/// Exits with code 2, unlike domain errors (code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub const KNOWN_KEYS: &[&str] = &[
    "curve",
    "mesh",
    "out-dir",
    "config",
    "seed",
    "threads",
    "t-end",
    "dt-safety",
    "semi-implicit",
    "entropy-every",
    "snapshot-every",
    "alpha",
    "samples",
    "polygon-n",
    "budget",
    "restarts",
    "epsilon",
    "suite",
];

/// All options a subcommand may consume; range validation happens here,
/// requiredness is checked per command.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub curve: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub t_end: Option<f64>,
    pub dt_safety: Option<f64>,
    pub semi_implicit: Option<bool>,
    pub entropy_every: Option<usize>,
    pub snapshot_every: Option<f64>,
    pub alpha: Option<f64>,
    pub samples: Option<usize>,
    pub polygon_n: Option<usize>,
    pub budget: Option<usize>,
    pub restarts: Option<usize>,
    pub epsilon: Option<f64>,
    pub suite: Option<String>,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    pub fn threads(&self) -> usize {
        self.threads.unwrap_or(1)
    }

    /// Parse raw `--key value` pairs, reading any `--config` file first so
    /// explicit flags override it.
    pub fn from_args(args: &[String]) -> Result<RunConfig, UsageError> {
        let mut flag_pairs: Vec<(String, String)> = Vec::new();
        let mut i = 0;
        while i < args.len() {
            let arg = &args[i];
            let Some(key) = arg.strip_prefix("--") else {
                return Err(UsageError(format!(
                    "unexpected positional argument {arg:?}; options are `--key value`"
                )));
            };
            if !KNOWN_KEYS.contains(&key) {
                return Err(UsageError(format!("unknown option --{key}")));
            }
            // booleans may omit the value
            let boolean = key == "semi-implicit";
            if boolean && (i + 1 >= args.len() || args[i + 1].starts_with("--")) {
                flag_pairs.push((key.to_string(), "true".to_string()));
                i += 1;
                continue;
            }
            if i + 1 >= args.len() {
                return Err(UsageError(format!("option --{key} needs a value")));
            }
            flag_pairs.push((key.to_string(), args[i + 1].clone()));
            i += 2;
        }

        let mut merged: BTreeMap<String, String> = BTreeMap::new();
        if let Some((_, path)) = flag_pairs.iter().find(|(k, _)| k == "config") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {path:?}: {e}")))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(UsageError(format!(
                        "config line {}: expected `key = value`, got {line:?}",
                        lineno + 1
                    )));
                };
                let key = key.trim();
                if !KNOWN_KEYS.contains(&key) {
                    return Err(UsageError(format!(
                        "config line {}: unknown key {key:?}",
                        lineno + 1
                    )));
                }
                merged.insert(key.to_string(), value.trim().to_string());
            }
        }
        for (k, v) in flag_pairs {
            merged.insert(k, v); // flags override the file
        }

        let mut cfg = RunConfig::default();
        for (key, value) in merged {
            cfg.set(&key, &value)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        let bad = |what: &str| UsageError(format!("--{key}: {what}, got {value:?}"));
        match key {
            "curve" => self.curve = Some(PathBuf::from(value)),
            "mesh" => self.mesh = Some(PathBuf::from(value)),
            "out-dir" => self.out_dir = Some(PathBuf::from(value)),
            "config" => {}
            "seed" => self.seed = Some(value.parse().map_err(|_| bad("expected an integer"))?),
            "threads" => {
                let n: usize = value.parse().map_err(|_| bad("expected an integer"))?;
                if n == 0 || n > 1024 {
                    return Err(bad("expected 1..=1024"));
                }
                self.threads = Some(n);
            }
            "t-end" => {
                let t: f64 = value.parse().map_err(|_| bad("expected a number"))?;
                if !(t > 0.0) || !t.is_finite() {
                    return Err(bad("expected a positive number"));
                }
                self.t_end = Some(t);
            }
            "dt-safety" => {
                let v: f64 = value.parse().map_err(|_| bad("expected a number"))?;
                if !(v > 0.0 && v <= 1.0) {
                    return Err(bad("expected a number in (0, 1]"));
                }
                self.dt_safety = Some(v);
            }
            "semi-implicit" => {
                self.semi_implicit = Some(match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(bad("expected true/false")),
                })
            }
            "entropy-every" => {
                self.entropy_every =
                    Some(value.parse().map_err(|_| bad("expected an integer"))?)
            }
            "snapshot-every" => {
                let v: f64 = value.parse().map_err(|_| bad("expected a number"))?;
                if !(v > 0.0) || !v.is_finite() {
                    return Err(bad("expected a positive number"));
                }
                self.snapshot_every = Some(v);
            }
            "alpha" => {
                let v: f64 = value.parse().map_err(|_| bad("expected a number"))?;
                if !(v > 0.0 && v < 4.0 * std::f64::consts::PI) {
                    return Err(bad("expected a number in (0, 4π)"));
                }
                self.alpha = Some(v);
            }
            "samples" => {
                let n: usize = value.parse().map_err(|_| bad("expected an integer"))?;
                if n < 2 || n > 10_000 {
                    return Err(bad("expected 2..=10000"));
                }
                self.samples = Some(n);
            }
            "polygon-n" => {
                let n: usize = value.parse().map_err(|_| bad("expected an integer"))?;
                if n < 3 || n > 4096 {
                    return Err(bad("expected 3..=4096"));
                }
                self.polygon_n = Some(n);
            }
            "budget" => {
                let n: usize = value.parse().map_err(|_| bad("expected an integer"))?;
                if n < 100 {
                    return Err(bad("expected at least 100"));
                }
                self.budget = Some(n);
            }
            "restarts" => {
                let n: usize = value.parse().map_err(|_| bad("expected an integer"))?;
                if n == 0 || n > 100 {
                    return Err(bad("expected 1..=100"));
                }
                self.restarts = Some(n);
            }
            "epsilon" => {
                let v: f64 = value.parse().map_err(|_| bad("expected a number"))?;
                if !(v > 0.0) || !v.is_finite() {
                    return Err(bad("expected a positive number"));
                }
                self.epsilon = Some(v);
            }
            "suite" => {
                if value != "fast" && value != "full" {
                    return Err(bad("expected `fast` or `full`"));
                }
                self.suite = Some(value.to_string());
            }
            other => return Err(UsageError(format!("unknown option --{other}"))),
        }
        Ok(())
    }
}
