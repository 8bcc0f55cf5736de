//! `key = value` configuration files (UTF-8, `#` comments); command-line
//! flags take precedence over file entries.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub fn load(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key = value", path.display(), lineno + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}
