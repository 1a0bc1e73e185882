//! Settings file handling. A settings file holds `key = value` lines: solver
//! and sweep keys are consumed here, everything else is a receiver parameter.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fracpn::receiver::ReceiverParams;

pub const PARAMS_ENV: &str = "FRACPN_PARAMS";

const SOLVER_KEYS: [&str; 11] = [
    "alpha",
    "eps",
    "tol",
    "max_iter",
    "round_digits",
    "alpha_min",
    "alpha_max",
    "alpha_step",
    "integer_exclusion",
    "dedup_tol",
    "threads",
];

#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub receiver: ReceiverParams,
    solver: HashMap<&'static str, f64>,
}

impl Settings {
    /// Loads `path` (if any) on top of the built-in defaults, then applies
    /// `overrides` (`key=value` strings from the command line).
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut s = Settings::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read settings file {}", path.display()))?;
            s.apply(&text)
                .with_context(|| format!("in settings file {}", path.display()))?;
        }
        for (i, o) in overrides.iter().enumerate() {
            s.apply(o).with_context(|| format!("in --param #{} '{o}'", i + 1))?;
        }
        Ok(s)
    }

    fn apply(&mut self, text: &str) -> Result<()> {
        // solver lines are blanked so receiver errors keep their line numbers
        let mut receiver_text = String::with_capacity(text.len());
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let key = line.split_once('=').map(|(k, _)| k.trim().to_ascii_lowercase());
            match key.as_deref().and_then(|k| SOLVER_KEYS.iter().find(|s| **s == k)) {
                Some(&k) => {
                    let value = line.split_once('=').map(|(_, v)| v.trim()).unwrap_or("");
                    let v: f64 = value
                        .parse()
                        .with_context(|| format!("line {}: invalid number '{value}' for {k}", i + 1))?;
                    self.solver.insert(k, v);
                }
                None => receiver_text.push_str(raw),
            }
            receiver_text.push('\n');
        }
        self.receiver.apply_kv(&receiver_text)?;
        Ok(())
    }

    /// Command-line value if given, else the file value, else `default`.
    pub fn resolve(&self, key: &'static str, flag: Option<f64>, default: f64) -> f64 {
        flag.or_else(|| self.solver.get(key).copied()).unwrap_or(default)
    }

    pub fn resolve_count(&self, key: &'static str, flag: Option<usize>, default: usize) -> Result<usize> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.solver.get(key) {
            None => Ok(default),
            Some(&v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(v as usize),
            Some(&v) => bail!("{key} must be a non-negative integer, got {v}"),
        }
    }
}
