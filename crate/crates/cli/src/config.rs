//! Optional `key = value` run configuration. Command-line flags win over the
//! file; keys are the long flag names (`omega-a`, `n-max`, `C`, ...), with `_`
//! accepted for `-`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Reads `path` if given, otherwise an empty configuration.
    pub fn load_optional(path: Option<&Path>) -> CliResult<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    /// Blank lines and `#` comments are skipped; duplicate keys are an error.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", lineno + 1)))?;
            let key = normalize(key);
            if key.is_empty() {
                return Err(CliError::usage(format!("line {}: empty key", lineno + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::usage(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(&normalize(key))
    }

    /// Rejects keys the command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        let allowed: Vec<String> = allowed.iter().map(|k| normalize(k)).collect();
        match self.entries.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(CliError::usage(format!("unknown config key '{k}'"))),
            None => Ok(()),
        }
    }

    /// The flag value if present, else the parsed file value, else `None`.
    pub fn value<T>(&self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(&normalize(key)) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key '{key}': {e}"))),
        }
    }

    pub fn value_or<T>(&self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.value(key, flag)?.unwrap_or(default))
    }

    pub fn required<T>(&self, key: &str, flag: Option<T>) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.value(key, flag)?
            .ok_or_else(|| CliError::usage(format!("missing required value '--{key}'")))
    }
}
