use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Current run configuration schema version.
pub const SCHEMA_VERSION: u64 = 1;

const KNOWN_KEYS: &[&str] = &[
    "version",
    "comment",
    "map",
    "forms",
    "q",
    "grid",
    "quad",
    "alpha",
    "trend_floor",
    "numeric",
    "clunie",
    "tumura",
];

/// Keys whose value may be a path to a JSON file instead of inline data.
const FILE_KEYS: &[&str] = &["map", "forms", "q", "u", "p", "w", "g", "f"];

/// Read and parse a JSON file, reporting which input failed.
pub fn read_json(path: &Path, what: &str) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{what}: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{what}: {} is not valid JSON: {e}", path.display())))
}

/// Deserialize `v`, naming the failing field on error.
pub fn decode<T: DeserializeOwned>(v: Value, what: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." {
            what.to_string()
        } else {
            format!("{what}.{path}")
        };
        CliError::usage(format!("{at}: {}", e.inner()))
    })
}

/// Load a typed input file.
pub fn load<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    decode(read_json(path, what)?, what)
}

/// A single self-describing run file (`verify <theorem> --config run.json`).
#[derive(Debug)]
pub struct RunConfig {
    dir: PathBuf,
    raw: Map<String, Value>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let raw = match read_json(path, "config")? {
            Value::Object(m) => m,
            _ => return Err(CliError::usage("config: top level must be a JSON object")),
        };
        Self::from_map(raw, path.parent().unwrap_or(Path::new(".")).to_path_buf())
    }

    pub fn from_map(raw: Map<String, Value>, dir: PathBuf) -> Result<RunConfig, CliError> {
        match raw.get("version").and_then(Value::as_u64) {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(CliError::usage(format!(
                    "config.version: unsupported schema version {v}, expected {SCHEMA_VERSION}"
                )))
            }
            None => {
                return Err(CliError::usage(format!(
                    "config.version: missing; set \"version\": {SCHEMA_VERSION}"
                )))
            }
        }
        if let Some(k) = raw.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::usage(format!(
                "config.{k}: unknown key (expected one of {})",
                KNOWN_KEYS.join(", ")
            )));
        }
        Ok(RunConfig { dir, raw })
    }

    fn resolve(&self, key: &str, v: &Value, what: &str) -> Result<Value, CliError> {
        match v {
            Value::String(p) if FILE_KEYS.contains(&key) => read_json(&self.dir.join(p), what),
            _ => Ok(v.clone()),
        }
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        let what = format!("config.{key}");
        self.raw
            .get(key)
            .map(|v| decode(self.resolve(key, v, &what)?, &what))
            .transpose()
    }

    pub fn require<T: DeserializeOwned>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?
            .ok_or_else(|| CliError::usage(format!("config.{key}: required for this command")))
    }

    /// A field of a nested object such as `clunie.u`.
    pub fn require_in<T: DeserializeOwned>(&self, section: &str, key: &str) -> Result<T, CliError> {
        let what = format!("config.{section}.{key}");
        let obj = self
            .raw
            .get(section)
            .and_then(Value::as_object)
            .ok_or_else(|| CliError::usage(format!("config.{section}: required object")))?;
        let v = obj
            .get(key)
            .ok_or_else(|| CliError::usage(format!("{what}: required")))?;
        decode(self.resolve(key, v, &what)?, &what)
    }

    pub fn get_in<T: DeserializeOwned>(
        &self,
        section: &str,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        let present = self
            .raw
            .get(section)
            .and_then(Value::as_object)
            .is_some_and(|o| o.contains_key(key));
        if present {
            self.require_in(section, key).map(Some)
        } else {
            Ok(None)
        }
    }
}
