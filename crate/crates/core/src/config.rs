//! Flat key-value config files.
//!
//! One `key = value` pair per line, `#` starts a comment, blank lines are
//! ignored. Keys are case-sensitive. The format is deliberately flat so that
//! resolved configs diff cleanly in provenance sidecars.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Parsed config: ordered key -> raw string value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::BadValue {
                key: format!("line {}", lineno + 1),
                value: line.to_string(),
                expected: "`key = value`",
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn from_entries<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Self {
            entries: pairs
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    /// Required f64 value; missing keys are reported by name.
    pub fn f64(&self, key: &str) -> Result<f64> {
        let raw = self
            .entries
            .get(key)
            .ok_or_else(|| Error::MissingKey(key.to_string()))?;
        raw.parse::<f64>().map_err(|_| Error::BadValue {
            key: key.to_string(),
            value: raw.clone(),
            expected: "a number",
        })
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.contains(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let raw = self
            .entries
            .get(key)
            .ok_or_else(|| Error::MissingKey(key.to_string()))?;
        raw.parse::<u64>().map_err(|_| Error::BadValue {
            key: key.to_string(),
            value: raw.clone(),
            expected: "a non-negative integer",
        })
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        if self.contains(key) {
            self.u64(key)
        } else {
            Ok(default)
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(other) => Err(Error::BadValue {
                key: key.to_string(),
                value: other.to_string(),
                expected: "a boolean (true/false)",
            }),
        }
    }

    /// All entries in key order, for provenance serialization.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
