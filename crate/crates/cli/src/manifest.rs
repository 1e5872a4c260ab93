//! Run manifests: every command with file outputs writes one next to them.
//! A manifest fully determines the outputs - identical manifest, identical
//! bytes - so reruns can be verified by comparison.

use crate::CliError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Fully resolved configuration after config-file merge and defaults.
    pub config: serde_json::Value,
    pub master_seed: Option<u64>,
    /// sha256 of each input file.
    pub inputs: BTreeMap<String, String>,
    /// Files written by this run, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &'static str, config: serde_json::Value) -> Self {
        RunManifest {
            tool: "peaklaw",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            master_seed: None,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.insert(
            path.display().to_string(),
            crate::util::sha256_hex(path)?,
        );
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Internal(format!("manifest serialization: {e}")))?;
        std::fs::write(dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}
