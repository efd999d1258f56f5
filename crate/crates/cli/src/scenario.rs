//! Loading, canonicalizing and hashing scenario configs.

use std::fs;
use std::path::Path;

use cumulative_cbf::Config;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub fn parse_config(text: &str, origin: &Path) -> Result<Config> {
    let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::config(origin, e))?;
    cfg.validate().map_err(|e| CliError::config(origin, e))?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, path)
}

/// Compact JSON with object keys sorted, every field present.
pub fn canonical_json(cfg: &Config) -> String {
    let value = serde_json::to_value(cfg).expect("config serializes");
    serde_json::to_string(&value).expect("value serializes")
}

/// SHA-256 of [`canonical_json`], lowercase hex.
pub fn config_hash(cfg: &Config) -> String {
    hex::encode(Sha256::digest(canonical_json(cfg).as_bytes()))
}
