//! Plain-text `key = value` config files.

use std::collections::BTreeMap;

use crate::error::CliError;

/// Parses `key = value` lines. `#` starts a comment line; keys are
/// case-insensitive and `_` is read as `-`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::spec("config", format!("line {lineno}: expected `key = value`")))?;
        let key = normalize_key(key);
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(CliError::spec("config", format!("line {lineno}: bad key {:?}", key)));
        }
        if value.is_empty() {
            return Err(CliError::spec("config", format!("line {lineno}: empty value for {key}")));
        }
        if map.insert(key.clone(), value.to_string()).is_some() {
            return Err(CliError::spec("config", format!("line {lineno}: duplicate key {key}")));
        }
    }
    Ok(map)
}

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}
