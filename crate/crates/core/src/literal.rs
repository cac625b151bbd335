//! Literal values with a canonical textual form.
//!
//! The canonical text is what gets counted, compared, serialized and emitted:
//! strings use single quotes with backslash escapes, ints are base-10, floats
//! use the shortest round-trip decimal, and `True`/`False`/`None` are verbatim.
//! There is no constant folding, so `1 + 1` is not a literal at all.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::python::parser::parse_expression;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiteralTag {
    String,
    Int,
    Float,
    Bool,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiteralValue {
    tag: LiteralTag,
    text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a literal value")]
pub struct NotALiteral(pub String);

impl LiteralValue {
    pub fn string(value: &str) -> Self {
        LiteralValue { tag: LiteralTag::String, text: quote_string(value) }
    }

    pub fn int(value: i128) -> Self {
        LiteralValue { tag: LiteralTag::Int, text: value.to_string() }
    }

    /// `None` for NaN, which has no literal spelling.
    pub fn float(value: f64) -> Option<Self> {
        if value.is_nan() {
            return None;
        }
        let text = if value == f64::INFINITY {
            "1e999".to_string()
        } else if value == f64::NEG_INFINITY {
            "-1e999".to_string()
        } else {
            // Debug always keeps a `.` or an exponent, so floats never look like ints.
            format!("{value:?}")
        };
        Some(LiteralValue { tag: LiteralTag::Float, text })
    }

    pub fn bool(value: bool) -> Self {
        LiteralValue {
            tag: LiteralTag::Bool,
            text: if value { "True" } else { "False" }.to_string(),
        }
    }

    pub fn none() -> Self {
        LiteralValue { tag: LiteralTag::None, text: "None".to_string() }
    }

    pub fn tag(&self) -> LiteralTag {
        self.tag
    }

    pub fn canonical_text(&self) -> &str {
        &self.text
    }

    /// The unquoted content of a string literal.
    pub fn as_str(&self) -> Option<String> {
        if self.tag != LiteralTag::String {
            return None;
        }
        parse_expression(&self.text).ok()?.as_literal_string()
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self.tag {
            LiteralTag::Int | LiteralTag::Float => {
                if self.text == "1e999" {
                    Some(f64::INFINITY)
                } else if self.text == "-1e999" {
                    Some(f64::NEG_INFINITY)
                } else {
                    self.text.parse().ok()
                }
            }
            LiteralTag::Bool => Some(if self.text == "True" { 1.0 } else { 0.0 }),
            _ => None,
        }
    }

    /// Parses Python literal source text (`'a'`, `-3`, `1.5`, `True`, `None`).
    pub fn parse(text: &str) -> Result<Self, NotALiteral> {
        let expr = parse_expression(text).map_err(|_| NotALiteral(text.to_string()))?;
        expr.as_literal().ok_or_else(|| NotALiteral(text.to_string()))
    }
}

/// Ordering is by canonical text; canonical texts never coincide across tags.
impl Ord for LiteralValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.text.cmp(&other.text).then(self.tag.cmp(&other.tag))
    }
}

impl PartialOrd for LiteralValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LiteralValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for LiteralValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for LiteralValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LiteralValue::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Renders `value` as a single-quoted Python string literal.
pub fn quote_string(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('\'');
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                out.push_str(&format!("\\x{:02x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(LiteralValue::parse("\"l2\"").unwrap().canonical_text(), "'l2'");
        assert_eq!(LiteralValue::parse("0x10").unwrap().canonical_text(), "16");
        assert_eq!(LiteralValue::parse("1_000").unwrap().canonical_text(), "1000");
        assert_eq!(LiteralValue::parse("-3").unwrap().canonical_text(), "-3");
        assert_eq!(LiteralValue::parse("1.").unwrap().canonical_text(), "1.0");
        assert_eq!(LiteralValue::parse("1e-5").unwrap().canonical_text(), "1e-5");
        assert_eq!(LiteralValue::parse("True").unwrap().tag(), LiteralTag::Bool);
        assert_eq!(LiteralValue::parse("None").unwrap(), LiteralValue::none());
        assert_eq!(LiteralValue::parse("'it\\'s'").unwrap().canonical_text(), "'it\\'s'");
    }

    #[test]
    fn non_literals_are_rejected() {
        for text in ["1 + 1", "x", "f()", "(1, 2)", "b'x'", "f'{x}'", "[1]", "1j"] {
            assert!(LiteralValue::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn infinity_round_trips() {
        let inf = LiteralValue::parse("1e999").unwrap();
        assert_eq!(inf, LiteralValue::float(f64::INFINITY).unwrap());
        assert_eq!(LiteralValue::parse(inf.canonical_text()).unwrap(), inf);
    }

    #[test]
    fn string_content_survives_quoting() {
        let v = LiteralValue::string("a'b\\c\nd\u{1}é");
        assert_eq!(v.as_str().unwrap(), "a'b\\c\nd\u{1}é");
        assert_eq!(LiteralValue::parse(v.canonical_text()).unwrap(), v);
    }
}
