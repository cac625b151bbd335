use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::{Captures, Regex};
use serde::Serialize;

use crate::annotation::{Annotation, EnumMember, Payload};
use crate::literal::{LiteralTag, LiteralValue};
use crate::model::{ApiModel, ClassDecl, FunctionDecl, Parameter};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinedPreconditions {
    pub annotations: Vec<Annotation>,
    pub warnings: Vec<String>,
}

const NUM: &str = r"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)";
const UPPER: &str = r"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?|(?:np\.|numpy\.|math\.)?inf(?:inity)?)";
const MODAL: &str = r"(?:must|should|has to|needs to|is required to)\s+be\s+";

struct BoundsRule {
    id: &'static str,
    re: Regex,
    interval: fn(&Captures) -> Option<Interval>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Interval {
    min: Option<f64>,
    min_exclusive: bool,
    max: Option<f64>,
    max_exclusive: bool,
}

fn num(c: &Captures, i: usize) -> Option<f64> {
    let s = c.get(i)?.as_str().to_ascii_lowercase();
    if s.ends_with("inf") || s.ends_with("infinity") {
        return Some(if s.starts_with('-') { f64::NEG_INFINITY } else { f64::INFINITY });
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}

/// Infinite ends become unbounded.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn rx(pattern: &str) -> Regex {
    Regex::new(&format!("(?i){pattern}")).expect("valid pattern")
}

static BOUNDS: LazyLock<Vec<BoundsRule>> = LazyLock::new(|| {
    vec![
        BoundsRule {
            id: "bounds.range",
            re: rx(&format!(r"\brange\s*([\[(])\s*{NUM}\s*,\s*{UPPER}\s*([\])])")),
            interval: |c| {
                let max = num(c, 3)?;
                Some(Interval {
                    min: Some(num(c, 2)?),
                    min_exclusive: &c[1] == "(",
                    max: finite(max),
                    max_exclusive: max.is_finite() && &c[4] == ")",
                })
            },
        },
        BoundsRule {
            id: "bounds.greater_and_less",
            re: rx(&format!(
                r"\b(?:greater|larger) than (or equal to )?{NUM},? and (?:less|smaller) than (or equal to )?{NUM}"
            )),
            interval: |c| {
                Some(Interval {
                    min: Some(num(c, 2)?),
                    min_exclusive: c.get(1).is_none(),
                    max: Some(num(c, 4)?),
                    max_exclusive: c.get(3).is_none(),
                })
            },
        },
        BoundsRule {
            id: "bounds.between",
            re: rx(&format!(r"\bbetween {NUM} and {NUM}(\s*\(?exclusive\)?)?")),
            interval: |c| {
                let open = c.get(3).is_some();
                Some(Interval { min: Some(num(c, 1)?), min_exclusive: open, max: Some(num(c, 2)?), max_exclusive: open })
            },
        },
        BoundsRule {
            id: "bounds.strictly_positive",
            re: rx(r"\bstrictly positive\b"),
            interval: |_| Some(Interval { min: Some(0.0), min_exclusive: true, max: None, max_exclusive: false }),
        },
        BoundsRule {
            id: "bounds.non_negative",
            re: rx(r"\bnon-?negative\b"),
            interval: |_| Some(Interval { min: Some(0.0), min_exclusive: false, max: None, max_exclusive: false }),
        },
        BoundsRule {
            id: "bounds.at_least",
            re: rx(&format!(r"{MODAL}(?:greater than or equal to|larger than or equal to|at least|>=)\s*{NUM}")),
            interval: |c| Some(Interval { min: Some(num(c, 1)?), min_exclusive: false, max: None, max_exclusive: false }),
        },
        BoundsRule {
            id: "bounds.greater_than",
            re: rx(&format!(r"{MODAL}(?:greater|larger|bigger) than\s*{NUM}")),
            interval: |c| Some(Interval { min: Some(num(c, 1)?), min_exclusive: true, max: None, max_exclusive: false }),
        },
        BoundsRule {
            id: "bounds.at_most",
            re: rx(&format!(r"{MODAL}(?:less than or equal to|smaller than or equal to|at most|<=)\s*{NUM}")),
            interval: |c| Some(Interval { min: None, min_exclusive: false, max: Some(num(c, 1)?), max_exclusive: false }),
        },
        BoundsRule {
            id: "bounds.less_than",
            re: rx(&format!(r"{MODAL}(?:less|smaller) than\s*{NUM}")),
            interval: |c| Some(Interval { min: None, min_exclusive: false, max: Some(num(c, 1)?), max_exclusive: true }),
        },
        BoundsRule {
            id: "bounds.positive",
            re: rx(&format!(r"{MODAL}positive\b")),
            interval: |_| Some(Interval { min: Some(0.0), min_exclusive: true, max: None, max_exclusive: false }),
        },
    ]
});

static DEPENDENCY: LazyLock<Vec<(&'static str, Regex)>> = LazyLock::new(|| {
    vec![
        ("dependency.only_when", rx(r"\bonly (?:used|relevant|considered|applies|applied) (?:when|if)\s+(.+)")),
        ("dependency.ignored_when", rx(r"\bignored (?:when|if|unless)\s+(.+)")),
    ]
});

static HEDGE: LazyLock<Regex> = LazyLock::new(|| rx(r"\b(?:often|typically|usually)\b"));
static WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[A-Za-z_][A-Za-z0-9_]*").expect("valid pattern"));

/// Splits on `.`, `!` or `?` followed by whitespace or the end.
fn sentences(text: &str) -> Vec<String> {
    let flat = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = flat.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if matches!(b, b'.' | b'!' | b'?') && bytes.get(i + 1).is_none_or(|&n| n == b' ') {
            out.push(flat[start..=i].trim().to_string());
            start = i + 1;
        }
    }
    if start < flat.len() && !flat[start..].trim().is_empty() {
        out.push(flat[start..].trim().to_string());
    }
    out
}

fn pascal_case(s: &str) -> String {
    s.split('_')
        .filter(|p| !p.is_empty())
        .map(|p| {
            let mut c = p.chars();
            c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
        })
        .collect()
}

/// Uppercased, with anything outside `[A-Z0-9]` replaced by `_`.
pub fn member_name(value: &str) -> String {
    let s: String = value
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' })
        .collect();
    if s.is_empty() {
        "EMPTY".to_string()
    } else if s.starts_with(|c: char| c.is_ascii_digit() || c == '_') {
        format!("V_{s}")
    } else {
        s
    }
}

/// Top-level comma split that respects quotes.
fn split_members(inner: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut quote: Option<char> = None;
    let mut escaped = false;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match quote {
            Some(q) => {
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    quote = None;
                }
            }
            None if c == '\'' || c == '"' => quote = Some(c),
            None if c == ',' => {
                out.push(inner[start..i].trim());
                start = i + 1;
            }
            None => {}
        }
    }
    out.push(inner[start..].trim());
    out
}

/// String values of a set-notation type such as `{'l1', 'l2'}, optional`.
pub(crate) fn enum_values(type_text: &str) -> Option<Vec<String>> {
    let t = type_text.trim();
    let t = t.strip_suffix("optional").map(|r| r.trim_end().trim_end_matches(',').trim_end()).unwrap_or(t);
    let inner = t.strip_prefix('{')?.strip_suffix('}')?;
    let mut values = Vec::new();
    for m in split_members(inner) {
        let lit = LiteralValue::parse(m).ok().filter(|l| l.tag() == LiteralTag::String)?;
        let v = lit.as_str()?;
        if !values.contains(&v) {
            values.push(v);
        }
    }
    (values.len() >= 2).then_some(values)
}

fn skips_bounds(type_text: &str) -> bool {
    let t = type_text.trim_start().to_ascii_lowercase();
    t.starts_with("bool") || t.starts_with("str") || t.starts_with('{')
}

/// Rule-based mining over parameter descriptions and types. Runs on
/// public, non-variadic parameters and is deterministic.
pub fn mine_preconditions(model: &ApiModel) -> MinedPreconditions {
    let mut out = MinedPreconditions { annotations: Vec::new(), warnings: Vec::new() };
    for (f, c) in model.functions() {
        if !f.is_public || c.is_some_and(|c| !c.is_public()) {
            continue;
        }
        for p in f.parameters.iter().filter(|p| !p.kind.is_variadic()) {
            mine_parameter(f, c, p, &mut out);
        }
    }
    out
}

fn mine_parameter(f: &FunctionDecl, c: Option<&ClassDecl>, p: &Parameter, out: &mut MinedPreconditions) {
    let target = f.param_qname(p);
    if let Some(values) = enum_values(&p.doc_type) {
        let owner = match c {
            Some(c) if f.is_init() => c.name(),
            _ => f.name(),
        };
        let members: Vec<EnumMember> = values.iter().map(|v| EnumMember { name: member_name(v), value: v.clone() }).collect();
        let names: BTreeSet<&str> = members.iter().map(|m| m.name.as_str()).collect();
        if names.len() == members.len() {
            out.annotations.push(Annotation::inferred(
                target.clone(),
                Payload::ReplaceWithEnum { enum_name: format!("{}{}", pascal_case(owner), pascal_case(&p.name)), members },
                "enum.set_notation",
                p.doc_type.clone(),
            ));
        } else {
            out.warnings.push(format!("{target}: enum values {values:?} collide after name sanitization"));
        }
    }
    let sents: Vec<String> = sentences(&p.doc_description).into_iter().filter(|s| !HEDGE.is_match(s)).collect();
    if !skips_bounds(&p.doc_type) {
        'bounds: for s in &sents {
            for rule in BOUNDS.iter() {
                let Some(caps) = rule.re.captures(s) else { continue };
                let Some(iv) = (rule.interval)(&caps) else { continue };
                let lo = iv.min.unwrap_or(f64::NEG_INFINITY);
                let hi = iv.max.unwrap_or(f64::INFINITY);
                if lo > hi || (lo == hi && (iv.min_exclusive || iv.max_exclusive)) {
                    out.warnings.push(format!("{target}: empty interval in `{s}`"));
                    continue;
                }
                out.annotations.push(Annotation::inferred(
                    target.clone(),
                    Payload::AddBoundsCheck { min: iv.min, min_exclusive: iv.min_exclusive, max: iv.max, max_exclusive: iv.max_exclusive },
                    rule.id,
                    s.clone(),
                ));
                break 'bounds;
            }
        }
    }
    'dependency: for s in &sents {
        for (id, re) in DEPENDENCY.iter() {
            let Some(caps) = re.captures(s) else { continue };
            let condition = caps[1].trim_end_matches(['.', '!', '?']).trim().to_string();
            let depends_on = WORD
                .find_iter(&condition)
                .map(|m| m.as_str())
                .find(|w| *w != p.name && f.param(w).is_some_and(|o| !o.kind.is_variadic()));
            if let Some(d) = depends_on {
                out.annotations.push(Annotation::inferred(
                    target.clone(),
                    Payload::DependencyNote { depends_on: d.to_string(), condition_text: condition.clone() },
                    id,
                    s.clone(),
                ));
                break 'dependency;
            }
        }
    }
}
