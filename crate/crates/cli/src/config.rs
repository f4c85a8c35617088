//! Configuration resolution (defaults < config file < flags), the resolved
//! config echo, and artifact writing helpers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Optional per-subcommand sections of the TOML configuration file.
/// Every key mirrors the long flag of the same name (dashes as underscores);
/// flags take precedence over file values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub global: GlobalSection,
    #[serde(default)]
    pub zeros: toml::Table,
    #[serde(default, rename = "turning-points")]
    pub turning_points: toml::Table,
    #[serde(default)]
    pub weier: toml::Table,
    #[serde(default, rename = "cbc-ratios")]
    pub cbc_ratios: toml::Table,
    #[serde(default)]
    pub adjust: toml::Table,
    #[serde(default)]
    pub fit: toml::Table,
    #[serde(default)]
    pub replay: toml::Table,
    #[serde(default)]
    pub iterate: toml::Table,
    #[serde(default)]
    pub analyze: toml::Table,
    #[serde(default)]
    pub identities: toml::Table,
    #[serde(default)]
    pub dominici: toml::Table,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalSection {
    pub outdir: Option<PathBuf>,
    pub label: Option<String>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", p.display())))?;
                toml::from_str(&text)
                    .map_err(|e| CliError::validation(format!("malformed config {}: {e}", p.display())))
            }
        }
    }

    pub fn section(&self, name: &str) -> &toml::Table {
        match name {
            "zeros" => &self.zeros,
            "turning-points" => &self.turning_points,
            "weier" => &self.weier,
            "cbc-ratios" => &self.cbc_ratios,
            "adjust" => &self.adjust,
            "fit" => &self.fit,
            "replay" => &self.replay,
            "iterate" => &self.iterate,
            "analyze" => &self.analyze,
            "identities" => &self.identities,
            "dominici" => &self.dominici,
            _ => {
                static EMPTY: std::sync::OnceLock<toml::Table> = std::sync::OnceLock::new();
                EMPTY.get_or_init(toml::Table::new)
            }
        }
    }
}

/// Typed lookup in a config section.
pub trait FromTomlValue: Sized {
    fn from_value(v: &toml::Value) -> Option<Self>;
}

impl FromTomlValue for f64 {
    fn from_value(v: &toml::Value) -> Option<Self> {
        v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
    }
}
impl FromTomlValue for usize {
    fn from_value(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| usize::try_from(i).ok())
    }
}
impl FromTomlValue for u64 {
    fn from_value(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| u64::try_from(i).ok())
    }
}
impl FromTomlValue for bool {
    fn from_value(v: &toml::Value) -> Option<Self> {
        v.as_bool()
    }
}
impl FromTomlValue for String {
    fn from_value(v: &toml::Value) -> Option<Self> {
        v.as_str().map(str::to_string)
    }
}
impl FromTomlValue for PathBuf {
    fn from_value(v: &toml::Value) -> Option<Self> {
        v.as_str().map(PathBuf::from)
    }
}
impl FromTomlValue for Vec<f64> {
    fn from_value(v: &toml::Value) -> Option<Self> {
        v.as_array()
            .map(|a| a.iter().filter_map(f64::from_value).collect())
    }
}

/// flag value, else config value, else default.
pub fn pick<T: FromTomlValue + Clone>(
    flag: Option<T>,
    section: &toml::Table,
    key: &str,
    default: T,
) -> T {
    flag.or_else(|| section.get(key).and_then(T::from_value))
        .unwrap_or(default)
}

/// flag value, else config value.
pub fn pick_opt<T: FromTomlValue + Clone>(
    flag: Option<T>,
    section: &toml::Table,
    key: &str,
) -> Option<T> {
    flag.or_else(|| section.get(key).and_then(T::from_value))
}

/// The fully resolved configuration of one run, echoed to disk.
pub struct RunContext {
    pub out_dir: PathBuf,
    pub version: &'static str,
    pub config_hash: String,
    resolved: toml::Table,
}

impl RunContext {
    /// Create the run directory `<outdir>/<subcommand>/<label>/` and hash the
    /// resolved configuration.
    pub fn create(
        outdir: &Path,
        subcommand: &str,
        label: &str,
        resolved: toml::Table,
    ) -> Result<Self, CliError> {
        let out_dir = outdir.join(subcommand).join(label);
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| CliError::validation(format!("cannot create {}: {e}", out_dir.display())))?;
        let version = env!("CARGO_PKG_VERSION");
        let canonical = toml::to_string(&resolved)
            .map_err(|e| CliError::validation(format!("cannot serialize config: {e}")))?;
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let config_hash: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(Self { out_dir, version, config_hash, resolved })
    }

    /// Write the config echo: resolved values plus a meta section carrying
    /// the timestamp (the only non-reproducible artifact field), tool
    /// version, and config hash.
    pub fn write_echo(&self) -> Result<(), CliError> {
        let mut doc = self.resolved.clone();
        let mut meta = toml::Table::new();
        meta.insert("timestamp".into(), toml::Value::String(chrono::Utc::now().to_rfc3339()));
        meta.insert("version".into(), toml::Value::String(self.version.to_string()));
        meta.insert("config_hash".into(), toml::Value::String(self.config_hash.clone()));
        doc.insert("meta".into(), toml::Value::Table(meta));
        let text = toml::to_string(&doc)
            .map_err(|e| CliError::validation(format!("cannot serialize echo: {e}")))?;
        self.write_raw("config_echo.toml", text.as_bytes())
    }

    /// Write a CSV artifact with identification comment lines.
    pub fn write_csv(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let text = format!(
            "# version={}\n# config_hash={}\n{body}",
            self.version, self.config_hash
        );
        self.write_raw(name, text.as_bytes())?;
        Ok(self.out_dir.join(name))
    }

    /// Write a JSON artifact embedding version and config hash.
    pub fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut wrapped = serde_json::to_value(value)
            .map_err(|e| CliError::validation(format!("cannot serialize {name}: {e}")))?;
        if let serde_json::Value::Object(map) = &mut wrapped {
            map.insert("version".into(), serde_json::Value::String(self.version.into()));
            map.insert(
                "config_hash".into(),
                serde_json::Value::String(self.config_hash.clone()),
            );
        } else {
            wrapped = serde_json::json!({
                "version": self.version,
                "config_hash": self.config_hash,
                "value": wrapped,
            });
        }
        let text = serde_json::to_string_pretty(&wrapped)
            .map_err(|e| CliError::validation(format!("cannot serialize {name}: {e}")))?;
        self.write_raw(name, text.as_bytes())?;
        Ok(self.out_dir.join(name))
    }

    pub fn write_raw(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        let mut f = std::fs::File::create(&path)
            .map_err(|e| CliError::validation(format!("cannot create {}: {e}", path.display())))?;
        f.write_all(bytes)
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

/// Helpers to build the resolved-config table.
pub fn table_of(entries: Vec<(&str, toml::Value)>) -> toml::Table {
    let mut t = toml::Table::new();
    for (k, v) in entries {
        t.insert(k.to_string(), v);
    }
    t
}

pub fn v_f64(x: f64) -> toml::Value {
    toml::Value::Float(x)
}
pub fn v_int(x: usize) -> toml::Value {
    toml::Value::Integer(x as i64)
}
pub fn v_u64(x: u64) -> toml::Value {
    toml::Value::Integer(x as i64)
}
pub fn v_str(x: impl Into<String>) -> toml::Value {
    toml::Value::String(x.into())
}
pub fn v_bool(x: bool) -> toml::Value {
    toml::Value::Boolean(x)
}
pub fn v_list(xs: &[f64]) -> toml::Value {
    toml::Value::Array(xs.iter().map(|&x| toml::Value::Float(x)).collect())
}
