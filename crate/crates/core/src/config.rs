//! Flat `key = value` configuration text with `#` comments.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Entry {
    pub fn parse_f64(&self) -> Result<f64> {
        let v: f64 = self.value.parse().map_err(|_| self.error(format!("`{}` is not a number", self.value)))?;
        if !v.is_finite() {
            return Err(self.error(format!("`{}` must be finite", self.key)));
        }
        Ok(v)
    }

    pub fn parse_usize(&self) -> Result<usize> {
        self.value.parse().map_err(|_| self.error(format!("`{}` is not a non-negative integer", self.value)))
    }

    pub fn parse_bool(&self) -> Result<bool> {
        match self.value.as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(self.error(format!("`{other}` is not a boolean"))),
        }
    }

    pub fn error(&self, msg: String) -> Error {
        Error::Parse { line: self.line, msg }
    }
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Splits configuration text into entries. Duplicate keys are rejected.
pub fn parse_key_values(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or(Error::Parse { line, msg: "expected `key = value`".into() })?;
        let (key, value) = (k.trim(), v.trim());
        if !valid_key(key) {
            return Err(Error::Parse { line, msg: format!("invalid key `{key}`") });
        }
        if value.is_empty() {
            return Err(Error::Parse { line, msg: format!("missing value for `{key}`") });
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(Error::Parse { line, msg: format!("duplicate key `{key}` (first set on line {})", prev.line) });
        }
        out.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(out)
}
