//! Line-oriented `key = value` files with `[section]` headers.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may repeat;
//! repeated `p` (family members) and `observable` entries accumulate in order.

use std::fmt;

/// A diagnostic with 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub const SECTIONS: [&str; 5] = ["experiment", "system", "family", "grids", "tolerances"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
    /// 1-based column of the key.
    pub key_column: usize,
    /// 1-based column of the first character of the value.
    pub value_column: usize,
}

impl Entry {
    /// An error located `offset` bytes into the value.
    pub fn error_at(&self, offset: usize, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.line, column: self.value_column + offset, message: message.into() }
    }

    pub fn key_error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.line, column: self.key_column, message: message.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub entries: Vec<Entry>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim_end();
            let lead = body.len() - body.trim_start().len();
            let body_t = body.trim_start();
            if body_t.is_empty() || body_t.starts_with('#') {
                continue;
            }
            if let Some(rest) = body_t.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(ConfigError { line, column: lead + body_t.len() + 1, message: "expected ']'".into() });
                };
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(ConfigError {
                        line,
                        column: lead + 2,
                        message: format!("unknown section [{name}]; expected one of {}", SECTIONS.join(", ")),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let Some(eq) = body_t.find('=') else {
                return Err(ConfigError { line, column: lead + 1, message: "expected key = value".into() });
            };
            let key = body_t[..eq].trim_end();
            if key.is_empty() {
                return Err(ConfigError { line, column: lead + 1, message: "missing key before '='".into() });
            }
            let after = &body_t[eq + 1..];
            let value = after.trim_start();
            let value_column = lead + eq + 1 + (after.len() - value.len()) + 1;
            let Some(sec) = &section else {
                return Err(ConfigError { line, column: lead + 1, message: "key outside of any [section]".into() });
            };
            entries.push(Entry {
                section: sec.clone(),
                key: key.to_string(),
                value: value.to_string(),
                line,
                key_column: lead + 1,
                value_column,
            });
        }
        Ok(Self { entries })
    }

    pub fn all<'a>(&'a self, section: &'a str, key: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.section == section && e.key == key)
    }

    fn matching<'a>(&'a self, section: &str, key: &str) -> Vec<&'a Entry> {
        self.entries.iter().filter(|e| e.section == section && e.key == key).collect()
    }

    /// The single entry for `key`; a repeated key is an error.
    pub fn get(&self, section: &str, key: &str) -> Result<Option<&Entry>, ConfigError> {
        let found = self.matching(section, key);
        if let Some(dup) = found.get(1) {
            return Err(dup.key_error(format!("'{key}' given more than once in [{section}]")));
        }
        Ok(found.first().copied())
    }

    /// Fail on keys outside `allowed` (pairs of section and key).
    pub fn check_keys(&self, allowed: &[(&str, &str)]) -> Result<(), ConfigError> {
        for e in &self.entries {
            if !allowed.iter().any(|&(s, k)| s == e.section && k == e.key) {
                return Err(e.key_error(format!("unknown key '{}' in [{}]", e.key, e.section)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions() {
        let doc = Document::parse("# c\n[grids]\n  N =  10, 20\n").unwrap();
        let e = &doc.entries[0];
        assert_eq!((e.line, e.key_column, e.value_column), (3, 3, 8));
        assert_eq!(e.value, "10, 20");
    }

    #[test]
    fn errors() {
        assert_eq!(Document::parse("[nope]\n").unwrap_err().line, 1);
        let e = Document::parse("[grids]\nN 10\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        assert!(Document::parse("N = 1\n").is_err());
        let doc = Document::parse("[grids]\nN = 1\nN = 2\n").unwrap();
        assert_eq!(doc.get("grids", "N").unwrap_err().line, 3);
    }
}
