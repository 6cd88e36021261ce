//! Key=value config files and flag/config/default resolution.
//!
//! Flags win over config values, config values over defaults. Every
//! resolved setting is echoed into output headers for provenance.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parsed config file: flat key=value pairs, `#` comments allowed.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value: `{line}`", i + 1);
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: bad value `{raw}`: {e}")),
        }
    }
}

/// flag > config > default.
pub fn resolve<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Settings echo for output headers: `key=value`, sorted by key.
#[derive(Debug, Default, Clone)]
pub struct Provenance {
    entries: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(subcommand: &str) -> Self {
        let mut p = Self::default();
        p.entries.insert("command".into(), format!("gi {subcommand}"));
        p
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.entries.insert(key.to_string(), value.to_string());
        self
    }

    /// Header lines: the command first, settings on one sorted line.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![self.entries.get("command").cloned().unwrap_or_default()];
        let settings: Vec<String> = self
            .entries
            .iter()
            .filter(|(k, _)| *k != "command")
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if !settings.is_empty() {
            out.push(format!("config: {}", settings.join(" ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn config_file_parsing_and_precedence() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nwdl.mate_cap = 1200\nengine.depth=14").unwrap();
        let cfg = ConfigFile::load(Some(f.path())).unwrap();
        assert_eq!(cfg.get("wdl.mate_cap"), Some("1200"));
        let depth: Option<u32> = cfg.get_parsed("engine.depth").unwrap();
        assert_eq!(depth, Some(14));
        // flags win
        assert_eq!(resolve(Some(20u32), depth, 10), 20);
        assert_eq!(resolve(None, depth, 10), 14);
        assert_eq!(resolve::<u32>(None, None, 10), 10);
    }

    #[test]
    fn bad_config_line_is_an_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "just words").unwrap();
        assert!(ConfigFile::load(Some(f.path())).is_err());
    }

    #[test]
    fn provenance_lines_are_sorted_and_stable() {
        let mut p = Provenance::new("analyze");
        p.set("wdl.model", "engine").set("root_eval_cp", 0);
        let lines = p.lines();
        assert_eq!(lines[0], "gi analyze");
        assert_eq!(lines[1], "config: root_eval_cp=0 wdl.model=engine");
    }
}
