//! Config files, argument injection and run manifests.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const SEED_ENV: &str = "WORKMETER_SEED";
pub const DEFAULT_SEED: u64 = 0;
pub const MANIFEST: &str = "manifest.json";

/// Flag > config (already injected as flags) > `WORKMETER_SEED` > default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn value_to_arg(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => Some(items.iter().filter_map(value_to_arg).collect::<Vec<_>>().join(",")),
        other => Some(other.to_string()),
    }
}

/// `key=value` lines (`#` comments) or a manifest JSON whose `config` object is used.
pub fn load_config(path: &Path, command: &str) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if let Some(c) = v.get("command").and_then(Value::as_str) {
            if c != command {
                return Err(CliError::Usage(format!("manifest is for `{c}`, not `{command}`")));
            }
        }
        let Some(Value::Object(cfg)) = v.get("config") else {
            return Err(CliError::Usage(format!("{}: no `config` object", path.display())));
        };
        return Ok(cfg.iter().filter_map(|(k, v)| value_to_arg(v).map(|s| (k.clone(), s))).collect());
    }
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)));
        };
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Splices `--config FILE` entries in front of the explicit flags, so explicit flags win.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>, CliError> {
    if args.len() < 2 || args[1].starts_with('-') {
        return Ok(args);
    }
    let mut path = None;
    let mut rest = Vec::new();
    let mut it = args[2..].iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = it.next().cloned();
            if path.is_none() {
                return Err(CliError::Usage("--config needs a file".into()));
            }
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a.clone());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let mut out = vec![args[0].clone(), args[1].clone()];
    for (k, v) in load_config(Path::new(&path), &args[1])? {
        out.push(format!("--{k}"));
        out.push(v);
    }
    out.extend(rest);
    Ok(out)
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: Map<String, Value>,
    seed: u64,
    version: &'a str,
    timestamp: u64,
    outputs: &'a [&'a str],
}

/// Writes `manifest.json` next to the outputs; `config` must hold every resolved flag.
pub fn write_manifest(out: &Path, command: &str, config: &impl Serialize, seed: u64, outputs: &[&str]) -> Result<(), CliError> {
    let Value::Object(config) = serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))? else {
        unreachable!("command configs serialize to objects")
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let m = Manifest { command, config, seed, version: env!("CARGO_PKG_VERSION"), timestamp, outputs };
    write_json(&out.join(MANIFEST), &m)
}

pub fn write_json(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn config_entries_precede_explicit_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        fs::write(&p, "# tpm run\ndim = 4\nsamples=10\n").unwrap();
        let args = expand_args(s(&["wm", "tpm", "--samples", "3", "--config", p.to_str().unwrap()])).unwrap();
        assert_eq!(args, s(&["wm", "tpm", "--dim", "4", "--samples", "10", "--samples", "3"]));
    }

    #[test]
    fn manifests_round_trip_to_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(MANIFEST);
        fs::write(&p, r#"{"command":"optimize","config":{"dims":[2,3],"beta":1.0,"sampling":"rescaled","note":null}}"#).unwrap();
        let kv = load_config(&p, "optimize").unwrap();
        assert_eq!(kv, vec![("beta".into(), "1.0".into()), ("dims".into(), "2,3".into()), ("sampling".into(), "rescaled".into())]);
        assert!(matches!(load_config(&p, "tpm"), Err(CliError::Usage(_))));
    }
}
