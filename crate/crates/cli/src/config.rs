//! key=value config files. Entries act as defaults; command-line flags win.

use crate::CliError;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        ConfigFile {
            entries: HashMap::new(),
        }
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::empty());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Data(format!(
                    "config {}:{}: expected key=value",
                    path.display(),
                    idx + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    /// Fill `slot` from the config entry `key` if the flag was not given.
    pub fn fill<T: FromStr>(&self, slot: &mut Option<T>, key: &str) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(raw) = self.entries.get(key) {
                let parsed = raw.parse().map_err(|_| {
                    CliError::Usage(format!("config entry {key}={raw} does not parse"))
                })?;
                *slot = Some(parsed);
            }
        }
        Ok(())
    }

    /// Like [`fill`], for string-typed slots that need no parsing.
    pub fn fill_string(&self, slot: &mut Option<String>, key: &str) {
        if slot.is_none() {
            if let Some(raw) = self.entries.get(key) {
                *slot = Some(raw.clone());
            }
        }
    }

    pub fn fill_path(&self, slot: &mut Option<PathBuf>, key: &str) {
        if slot.is_none() {
            if let Some(raw) = self.entries.get(key) {
                *slot = Some(PathBuf::from(raw));
            }
        }
    }
}
