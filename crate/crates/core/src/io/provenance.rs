//! Provenance block attached to every CLI output.
//!
//! Holds no timestamps or host details, so identical inputs give identical
//! bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::histogram::DEFAULT_BIN_COUNT;
use crate::sampling::DEFAULT_POOL_FACTOR;
use crate::transform::{DEFAULT_EPSILON_SCALE, DEFAULT_LAMBDA};

use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub bin_count: usize,
    pub lambda: f64,
    pub epsilon_scale: f64,
    pub pool_factor: usize,
    pub cliff_ratio: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            bin_count: DEFAULT_BIN_COUNT,
            lambda: DEFAULT_LAMBDA,
            epsilon_scale: DEFAULT_EPSILON_SCALE,
            pool_factor: DEFAULT_POOL_FACTOR,
            cliff_ratio: crate::sampling::CLIFF_RATIO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the effective config's canonical JSON.
    pub config_sha256: String,
    pub seed: u64,
    pub defaults: Defaults,
    pub config: RunConfig,
    /// Digests of input files, in the order they were added.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputDigest>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub sha256: String,
}

impl Provenance {
    pub fn new(command: &str, config: &RunConfig) -> Result<Self> {
        let digest = Sha256::digest(config.canonical_json()?.as_bytes());
        Ok(Provenance {
            tool: "diffguide".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: hex::encode(digest),
            seed: config.seed,
            defaults: Defaults::default(),
            config: config.clone(),
            inputs: Vec::new(),
        })
    }

    pub fn with_input(mut self, role: &str, bytes: &[u8]) -> Self {
        self.inputs.push(InputDigest {
            role: role.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_config() {
        let a = Provenance::new("sample", &RunConfig::default()).unwrap();
        let b = Provenance::new("sample", &RunConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.config_sha256.len(), 64);
        let c = Provenance::new("sample", &RunConfig { ipc: 11, ..Default::default() }).unwrap();
        assert_ne!(a.config_sha256, c.config_sha256);
    }

    #[test]
    fn hash_is_sha256_of_canonical_json() {
        let config = RunConfig::default();
        let p = Provenance::new("fit", &config).unwrap();
        let expected = hex::encode(Sha256::digest(serde_json::to_string(&config).unwrap()));
        assert_eq!(p.config_sha256, expected);
        let p = p.with_input("pool", b"abc");
        assert_eq!(p.inputs[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
