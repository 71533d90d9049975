//! `--config` support: a TOML file whose keys are the long flag names.
//! Explicit flags win; the file only fills in what was not given.

use crate::{CliError, GridArgs, SimArgs, TestArgs};
use std::path::{Path, PathBuf};

struct ConfigTable {
    table: toml::Table,
    path: String,
}

impl ConfigTable {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table =
            text.parse().map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        Ok(ConfigTable { table, path: path.display().to_string() })
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.table.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::usage(format!(
                    "config {}: unknown key `{key}` (expected one of: {})",
                    self.path,
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn bad(&self, key: &str, want: &str) -> CliError {
        CliError::usage(format!("config {}: key `{key}` must be {want}", self.path))
    }

    fn fill_string(&self, key: &str, slot: &mut Option<String>) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(v) = self.table.get(key) {
                *slot = Some(v.as_str().ok_or_else(|| self.bad(key, "a string"))?.to_string());
            }
        }
        Ok(())
    }

    fn fill_path(&self, key: &str, slot: &mut Option<PathBuf>) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(v) = self.table.get(key) {
                *slot =
                    Some(PathBuf::from(v.as_str().ok_or_else(|| self.bad(key, "a path string"))?));
            }
        }
        Ok(())
    }

    fn fill_usize(&self, key: &str, slot: &mut Option<usize>) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(v) = self.table.get(key) {
                let n = v
                    .as_integer()
                    .filter(|&n| n >= 0)
                    .ok_or_else(|| self.bad(key, "a nonnegative integer"))?;
                *slot = Some(n as usize);
            }
        }
        Ok(())
    }

    fn fill_u64(&self, key: &str, slot: &mut Option<u64>) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(v) = self.table.get(key) {
                let n = v
                    .as_integer()
                    .filter(|&n| n >= 0)
                    .ok_or_else(|| self.bad(key, "a nonnegative integer"))?;
                *slot = Some(n as u64);
            }
        }
        Ok(())
    }

    fn fill_f64(&self, key: &str, slot: &mut Option<f64>) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(v) = self.table.get(key) {
                let x = match v {
                    toml::Value::Float(x) => *x,
                    toml::Value::Integer(n) => *n as f64,
                    _ => return Err(self.bad(key, "a number")),
                };
                *slot = Some(x);
            }
        }
        Ok(())
    }
}

pub fn merge_test(args: &mut TestArgs) -> Result<(), CliError> {
    let Some(path) = args.config.clone() else { return Ok(()) };
    let t = ConfigTable::load(&path)?;
    t.reject_unknown(&[
        "input", "stat", "method", "nR", "nS", "n0", "B", "alpha", "seed", "h", "source", "format",
        "out",
    ])?;
    t.fill_path("input", &mut args.input)?;
    t.fill_string("stat", &mut args.stat)?;
    t.fill_string("method", &mut args.method)?;
    t.fill_usize("nR", &mut args.n_r)?;
    t.fill_usize("nS", &mut args.n_s)?;
    t.fill_usize("n0", &mut args.n_0)?;
    t.fill_usize("B", &mut args.b)?;
    t.fill_f64("alpha", &mut args.alpha)?;
    t.fill_u64("seed", &mut args.seed)?;
    t.fill_string("h", &mut args.h)?;
    t.fill_string("source", &mut args.source)?;
    t.fill_string("format", &mut args.format)?;
    t.fill_path("out", &mut args.out)?;
    Ok(())
}

pub fn merge_grid(args: &mut GridArgs) -> Result<(), CliError> {
    let Some(path) = args.config.clone() else { return Ok(()) };
    let t = ConfigTable::load(&path)?;
    t.reject_unknown(&["kind", "d", "nR", "nS", "n0", "B", "orthant", "h", "source", "out"])?;
    t.fill_string("kind", &mut args.kind)?;
    t.fill_usize("d", &mut args.d)?;
    t.fill_usize("nR", &mut args.n_r)?;
    t.fill_usize("nS", &mut args.n_s)?;
    t.fill_usize("n0", &mut args.n_0)?;
    t.fill_usize("B", &mut args.b)?;
    t.fill_string("orthant", &mut args.orthant)?;
    t.fill_string("h", &mut args.h)?;
    t.fill_string("source", &mut args.source)?;
    t.fill_path("out", &mut args.out)?;
    Ok(())
}

pub fn merge_simulate(args: &mut SimArgs) -> Result<(), CliError> {
    let Some(path) = args.config.clone() else { return Ok(()) };
    let t = ConfigTable::load(&path)?;
    t.reject_unknown(&["scenario", "reps", "seed", "out"])?;
    t.fill_string("scenario", &mut args.scenario)?;
    t.fill_usize("reps", &mut args.reps)?;
    t.fill_u64("seed", &mut args.seed)?;
    t.fill_path("out", &mut args.out)?;
    Ok(())
}
