//! Line-based `key = value` configuration, overridden by flags. Every value
//! actually used is recorded so reports can echo the effective settings.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::CliError;

/// Parse `key = value` lines; blank lines and lines starting with `#` are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Invalid(format!("config line {}: expected key=value", n + 1)));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Invalid(format!("config line {}: empty key", n + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Default, Clone)]
pub struct Settings {
    file: BTreeMap<String, String>,
    echo: Map<String, Value>,
}

impl Settings {
    pub fn from_map(file: BTreeMap<String, String>) -> Self {
        Settings { file, echo: Map::new() }
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Invalid(format!("config {}: {}", p.display(), e)))?;
                Ok(Settings::from_map(parse_config(&text)?))
            }
        }
    }

    fn file_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Invalid(format!("config key {}: cannot parse {:?}", key, raw))),
        }
    }

    /// Flag, else config value, else `default`.
    pub fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let value = match flag {
            Some(v) => v,
            None => self.file_value(key)?.unwrap_or(default),
        };
        self.echo.insert(key.to_string(), Value::String(value.to_string()));
        Ok(value)
    }

    /// Flag, else config value, else absent.
    pub fn get_opt<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let value = match flag {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        if let Some(v) = &value {
            self.echo.insert(key.to_string(), Value::String(v.to_string()));
        }
        Ok(value)
    }

    pub fn flag(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        let value = flag || self.file_value::<bool>(key)?.unwrap_or(false);
        self.echo.insert(key.to_string(), Value::Bool(value));
        Ok(value)
    }

    pub fn echo(&self) -> Value {
        Value::Object(self.echo.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let map = parse_config("# comment\nK = 1000\n\nphase1=25\nslow = true\n").unwrap();
        let mut s = Settings::from_map(map);
        assert_eq!(s.get::<u64>("K", None, 616_000).unwrap(), 1000);
        assert_eq!(s.get::<u64>("K", Some(7), 616_000).unwrap(), 7);
        assert_eq!(s.get::<usize>("end-k", None, 300).unwrap(), 300);
        assert!(s.flag("slow", false).unwrap());
        assert_eq!(s.get_opt::<f64>("g-end", None).unwrap(), None);
        let echo = s.echo();
        assert_eq!(echo["K"], "7");
        assert_eq!(echo["end-k"], "300");
        assert!(echo.get("g-end").is_none());
    }

    #[test]
    fn rejects_malformed_lines_and_values() {
        assert!(parse_config("just words").is_err());
        assert!(parse_config("= 3").is_err());
        let mut s = Settings::from_map(parse_config("K = many").unwrap());
        assert!(s.get::<u64>("K", None, 1).is_err());
    }
}
