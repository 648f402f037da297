//! Flat key=value run configuration.
//!
//! A config file fully determines a run; command-line flags override file
//! entries, and the resolved set is echoed into every output header so a
//! run can be reproduced from its own output.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid("config", format!("cannot read {path:?}: {e}")))?;
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::invalid(
                    "config",
                    format!("line {} is not key=value: {raw:?}", lineno + 1),
                ));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }
}

/// Tracks the fully resolved parameters of a run for the output header.
#[derive(Debug, Default, Clone)]
pub struct Resolved {
    entries: BTreeMap<String, String>,
}

impl Resolved {
    pub fn put(&mut self, key: &str, value: impl Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// Header block: tool version, resolved config, seed. No timestamps, so
    /// reruns are byte-identical.
    pub fn header(&self, command: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# arw {} {}\n",
            env!("CARGO_PKG_VERSION"),
            command
        ));
        for (k, v) in &self.entries {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Resolves one parameter: command line beats config file beats default.
pub fn resolve<T>(
    cli: Option<T>,
    file: &FileConfig,
    key: &'static str,
    default: T,
) -> Result<T, CliError>
where
    T: FromStr + Display,
{
    if let Some(v) = cli {
        return Ok(v);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map_err(|_| CliError::invalid(key, format!("cannot parse {raw:?}"))),
        None => Ok(default),
    }
}

/// Same, for parameters without a default; errors when absent everywhere.
pub fn resolve_required<T>(
    cli: Option<T>,
    file: &FileConfig,
    key: &'static str,
) -> Result<T, CliError>
where
    T: FromStr + Display,
{
    if let Some(v) = cli {
        return Ok(v);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map_err(|_| CliError::invalid(key, format!("cannot parse {raw:?}"))),
        None => Err(CliError::invalid(
            key,
            "missing (set it on the command line or in --config)",
        )),
    }
}
