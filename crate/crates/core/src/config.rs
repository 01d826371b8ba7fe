//! Flat key-value configuration files: `[section]` headers, `key = value`
//! lines, `#` comments (whole-line or trailing). No nesting and no quoting;
//! values are numbers, words, or comma-separated lists of those. Errors
//! carry the 1-based line number of the offending input.

use crate::error::{Error, Result};
use std::collections::HashSet;
use std::path::Path;

/// One `key = value` line, tagged with its section and source line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    fn err(&self, msg: String) -> Error {
        Error::Config {
            line: self.line,
            msg,
        }
    }

    pub fn f64(&self) -> Result<f64> {
        self.value.parse::<f64>().map_err(|_| {
            self.err(format!(
                "{}.{}: expected a number, got \"{}\"",
                self.section, self.key, self.value
            ))
        })
    }

    pub fn u64(&self) -> Result<u64> {
        self.value.parse::<u64>().map_err(|_| {
            self.err(format!(
                "{}.{}: expected a nonnegative integer, got \"{}\"",
                self.section, self.key, self.value
            ))
        })
    }

    pub fn usize(&self) -> Result<usize> {
        self.value.parse::<usize>().map_err(|_| {
            self.err(format!(
                "{}.{}: expected a nonnegative integer, got \"{}\"",
                self.section, self.key, self.value
            ))
        })
    }

    pub fn f64_list(&self) -> Result<Vec<f64>> {
        self.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>().map_err(|_| {
                    self.err(format!(
                        "{}.{}: expected a comma-separated list of numbers, got \"{}\"",
                        self.section, self.key, s
                    ))
                })
            })
            .collect()
    }

    pub fn str_list(&self) -> Vec<String> {
        self.value
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    }

    /// Error constructor for callers that reject a well-formed entry on
    /// semantic grounds (unknown key, bad combination).
    pub fn reject(&self, msg: &str) -> Error {
        self.err(format!("{}.{}: {}", self.section, self.key, msg))
    }
}

/// Parsed file: entries in source order. Interpretation (typing, defaults,
/// unknown-key rejection) is the caller's job so each consumer can define
/// its own schema.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: Vec<Entry>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut entries = Vec::new();
        let mut section: Option<String> = None;
        let mut seen: HashSet<(String, String)> = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let stripped = stripped.trim();
            if stripped.is_empty() {
                continue;
            }
            if let Some(name) = stripped.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(Error::Config {
                    line,
                    msg: format!("section header missing closing bracket: \"{stripped}\""),
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::Config {
                        line,
                        msg: "empty section name".into(),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or(Error::Config {
                line,
                msg: format!("expected `key = value`, got \"{stripped}\""),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(Error::Config {
                    line,
                    msg: "empty key".into(),
                });
            }
            let section = section.clone().ok_or(Error::Config {
                line,
                msg: format!("key \"{key}\" appears before any [section] header"),
            })?;
            if !seen.insert((section.clone(), key.to_string())) {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate key {section}.{key}"),
                });
            }
            entries.push(Entry {
                section,
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }
        Ok(ConfigFile { entries })
    }

    pub fn from_path(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
        ConfigFile::parse(&text)
    }
}
