//! Flat `key = value` text files: the config and provenance format.
//!
//! One pair per line; `#` starts a comment; blank lines are ignored.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct CfgError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for CfgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

impl std::error::Error for CfgError {}

/// Parse every `key = value` pair in order. Keys may repeat; callers decide
/// the policy.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CfgError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CfgError {
                line: i + 1,
                reason: format!("expected `key = value`, got {line:?}"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(CfgError {
                line: i + 1,
                reason: "empty key".into(),
            });
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Render pairs back into the file form.
pub fn format_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
    out
}
