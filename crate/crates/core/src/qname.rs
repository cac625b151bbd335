//! Dotted identifiers for API elements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A dotted path naming one API element, e.g. `lib.m.C.run.x`.
///
/// Never empty; every segment is an ASCII identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedName(Vec<String>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QualifiedNameError {
    #[error("qualified name is empty")]
    Empty,
    #[error("invalid identifier segment `{0}`")]
    InvalidSegment(String),
}

/// True for `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c == '_' || c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c == '_' || c.is_ascii_alphanumeric())
}

const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
    "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
    "try", "while", "with", "yield",
];

pub fn is_keyword(s: &str) -> bool {
    PYTHON_KEYWORDS.contains(&s)
}

/// An identifier that can also be used as a Python name.
pub fn is_python_name(s: &str) -> bool {
    is_identifier(s) && !is_keyword(s)
}

impl QualifiedName {
    pub fn new<I, S>(segments: I) -> Result<Self, QualifiedNameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(QualifiedNameError::Empty);
        }
        if let Some(bad) = segments.iter().find(|s| !is_identifier(s)) {
            return Err(QualifiedNameError::InvalidSegment(bad.clone()));
        }
        Ok(QualifiedName(segments))
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Last segment.
    pub fn name(&self) -> &str {
        self.0.last().expect("qualified names are never empty")
    }

    pub fn parent(&self) -> Option<QualifiedName> {
        if self.0.len() <= 1 {
            None
        } else {
            Some(QualifiedName(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Appends one segment. Panics if `segment` is not an identifier.
    pub fn child(&self, segment: &str) -> QualifiedName {
        assert!(is_identifier(segment), "invalid identifier segment `{segment}`");
        let mut segments = self.0.clone();
        segments.push(segment.to_string());
        QualifiedName(segments)
    }

    pub fn with_name(&self, name: &str) -> QualifiedName {
        assert!(is_identifier(name), "invalid identifier segment `{name}`");
        let mut segments = self.0.clone();
        *segments.last_mut().unwrap() = name.to_string();
        QualifiedName(segments)
    }

    /// True if `self` equals `other` or lies below it.
    pub fn starts_with(&self, other: &QualifiedName) -> bool {
        self.0.len() >= other.0.len() && self.0[..other.0.len()] == other.0[..]
    }

    /// Replaces the prefix `from` with `to`. Returns `None` if `from` is not a prefix.
    pub fn rebase(&self, from: &QualifiedName, to: &QualifiedName) -> Option<QualifiedName> {
        if !self.starts_with(from) {
            return None;
        }
        let mut segments = to.0.clone();
        segments.extend_from_slice(&self.0[from.0.len()..]);
        Some(QualifiedName(segments))
    }

    pub fn dotted(&self) -> String {
        self.0.join(".")
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dotted())
    }
}

impl FromStr for QualifiedName {
    type Err = QualifiedNameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(QualifiedNameError::Empty);
        }
        QualifiedName::new(s.split('.'))
    }
}

impl Serialize for QualifiedName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.dotted())
    }
}

impl<'de> Deserialize<'de> for QualifiedName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_displays_dotted_names() {
        let q: QualifiedName = "lib.m.f".parse().unwrap();
        assert_eq!(q.segments(), ["lib", "m", "f"]);
        assert_eq!(q.to_string(), "lib.m.f");
        assert_eq!(q.name(), "f");
        assert_eq!(q.parent().unwrap().to_string(), "lib.m");
    }

    #[test]
    fn rejects_bad_segments() {
        assert_eq!("".parse::<QualifiedName>(), Err(QualifiedNameError::Empty));
        assert!("lib..f".parse::<QualifiedName>().is_err());
        assert!("lib.1f".parse::<QualifiedName>().is_err());
        assert!("lib.f-g".parse::<QualifiedName>().is_err());
    }

    #[test]
    fn rebase_swaps_prefix() {
        let q: QualifiedName = "lib.m.C.run".parse().unwrap();
        let from: QualifiedName = "lib.m.C".parse().unwrap();
        let to: QualifiedName = "lib.n.D".parse().unwrap();
        assert_eq!(q.rebase(&from, &to).unwrap().to_string(), "lib.n.D.run");
        assert!(from.rebase(&q, &to).is_none());
    }
}
