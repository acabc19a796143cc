//! Settings resolution: command-line flags override the matching section
//! of the TOML config file, which overrides built-in defaults.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// The parsed config file, or an empty table when none was given.
pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile {
                table: toml::Table::new(),
            });
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Data(boostdistill::Error::Io {
                path: path.to_path_buf(),
                source: e,
            })
        })?;
        let table = text
            .parse::<toml::Table>()
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        Ok(ConfigFile { table })
    }

    /// Overlays the flags that were given on the file's `[section]` and
    /// fills the rest with defaults.
    pub fn resolve<A: Serialize, R: DeserializeOwned>(&self, section: &str, flags: &A) -> Result<R, CliError> {
        let mut merged = match self.table.get(section) {
            Some(v) => match serde_json::to_value(v) {
                Ok(Value::Object(m)) => m,
                _ => return Err(CliError::Usage(format!("config section [{section}] must be a table"))),
            },
            None => Map::new(),
        };
        let Value::Object(given) = serde_json::to_value(flags).expect("flags serialize") else {
            unreachable!("flag structs serialize to objects")
        };
        for (k, v) in given {
            // absent options and unset switches leave the file value alone
            if !matches!(v, Value::Null | Value::Bool(false)) {
                merged.insert(k, v);
            }
        }
        serde_json::from_value(Value::Object(merged))
            .map_err(|e| CliError::Usage(format!("invalid settings for `{section}`: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize)]
    struct Flags {
        a: Option<u32>,
        b: Option<String>,
        quiet: bool,
    }

    #[derive(Debug, Deserialize, PartialEq)]
    #[serde(default, deny_unknown_fields)]
    struct Resolved {
        a: u32,
        b: String,
        quiet: bool,
    }

    impl Default for Resolved {
        fn default() -> Self {
            Resolved {
                a: 1,
                b: "x".into(),
                quiet: false,
            }
        }
    }

    #[test]
    fn flags_beat_file_beats_defaults() {
        let file = ConfigFile {
            table: "[s]\na = 5\nb = \"file\"\n".parse().unwrap(),
        };
        let flags = Flags {
            a: Some(9),
            b: None,
            quiet: false,
        };
        let r: Resolved = file.resolve("s", &flags).unwrap();
        assert_eq!(
            r,
            Resolved {
                a: 9,
                b: "file".into(),
                quiet: false
            }
        );
        let r: Resolved = file.resolve("other", &flags).unwrap();
        assert_eq!(r.b, "x");
        let bad = ConfigFile {
            table: "[s]\nzzz = 1\n".parse().unwrap(),
        };
        assert!(bad.resolve::<_, Resolved>("s", &flags).is_err());
    }
}
