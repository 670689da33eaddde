//! Reproducibility record embedded in every JSON artifact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Every flag, defaults included.
    pub flags: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    /// SHA-256 of each input file keyed by its path as given.
    pub inputs: BTreeMap<String, String>,
    /// Seconds since the epoch, only when supplied with `--timestamp`, so
    /// that reruns stay byte-identical by default.
    pub timestamp: Option<u64>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl RunManifest {
    pub fn new<F: Serialize>(subcommand: &str, flags: &F, seed: Option<u64>, timestamp: Option<u64>) -> Result<Self, CliError> {
        Ok(RunManifest {
            subcommand: subcommand.to_string(),
            flags: serde_json::to_value(flags).map_err(|e| CliError::internal(e.to_string()))?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            timestamp,
        })
    }

    pub fn with_input(mut self, path: &Path) -> Result<Self, CliError> {
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_of_known_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        std::fs::write(&p, "abc").unwrap();
        assert_eq!(sha256_file(&p).unwrap(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        let m = RunManifest::new("fit", &serde_json::json!({"p": 1}), Some(3), None).unwrap().with_input(&p).unwrap();
        assert_eq!(m.inputs.len(), 1);
        assert!(sha256_file(&dir.path().join("missing")).is_err());
    }
}
