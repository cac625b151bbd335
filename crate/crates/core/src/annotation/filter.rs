//! Filter expressions over API elements.
//!
//! Whitespace-separated terms, all of which must hold:
//! a bare word matches a case-insensitive substring of the dotted name,
//! `kind:class|function|parameter` restricts the element kind,
//! `is:unused|useless|rarely_used|almost_useless|useful` needs a usefulness report,
//! `is:removed` and `is:completed` look at the annotation set, and
//! `is:annotated`, `is:annotated:<Kind>` or `annotated:<Kind>` select annotated elements.

use super::{AnnotationKind, AnnotationSet, RemovedSet};
use crate::inference::{Classification, UsefulnessReport};
use crate::model::{ElementKind, ModelIndex};
use crate::qname::QualifiedName;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid filter term `{term}`: {message}")]
pub struct InvalidFilter {
    pub term: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Term {
    Name(String),
    Kind(ElementKind),
    Is(Classification),
    Removed,
    Completed,
    Annotated(Option<AnnotationKind>),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Filter {
    terms: Vec<Term>,
}

pub struct FilterContext<'a> {
    pub index: &'a ModelIndex<'a>,
    pub set: &'a AnnotationSet,
    pub report: Option<&'a UsefulnessReport>,
    removed: RemovedSet,
}

impl<'a> FilterContext<'a> {
    pub fn new(index: &'a ModelIndex<'a>, set: &'a AnnotationSet, report: Option<&'a UsefulnessReport>) -> Self {
        FilterContext { index, set, report, removed: set.removed() }
    }
}

fn invalid(term: &str, message: impl Into<String>) -> InvalidFilter {
    InvalidFilter { term: term.to_string(), message: message.into() }
}

fn annotation_kind(term: &str, s: &str) -> Result<AnnotationKind, InvalidFilter> {
    s.parse().map_err(|m: String| invalid(term, m))
}

impl Filter {
    pub fn parse(expr: &str) -> Result<Self, InvalidFilter> {
        let mut terms = Vec::new();
        for raw in expr.split_whitespace() {
            let Some((key, value)) = raw.split_once(':') else {
                terms.push(Term::Name(raw.to_lowercase()));
                continue;
            };
            let term = match (key.to_ascii_lowercase().as_str(), value) {
                ("kind", v) => Term::Kind(match v.to_ascii_lowercase().as_str() {
                    "class" => ElementKind::Class,
                    "function" => ElementKind::Function,
                    "parameter" => ElementKind::Parameter,
                    _ => return Err(invalid(raw, "expected class, function or parameter")),
                }),
                ("is", v) => match v.split_once(':') {
                    Some((a, k)) if a.eq_ignore_ascii_case("annotated") => Term::Annotated(Some(annotation_kind(raw, k)?)),
                    Some(_) => return Err(invalid(raw, "unknown state")),
                    None => match v.to_ascii_lowercase().as_str() {
                        "removed" => Term::Removed,
                        "completed" | "complete" => Term::Completed,
                        "annotated" => Term::Annotated(None),
                        s => Term::Is(Classification::parse(s).ok_or_else(|| invalid(raw, "unknown state"))?),
                    },
                },
                ("annotated", k) => Term::Annotated(Some(annotation_kind(raw, k)?)),
                _ => return Err(invalid(raw, format!("unknown key `{key}`"))),
            };
            terms.push(term);
        }
        Ok(Filter { terms })
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether some term asks for a usage classification.
    pub fn needs_report(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, Term::Is(_)))
    }

    /// Fails only when a classification term is used without a report.
    pub fn check(&self, ctx: &FilterContext<'_>) -> Result<(), InvalidFilter> {
        match self.terms.iter().find(|t| matches!(t, Term::Is(_))) {
            Some(Term::Is(c)) if ctx.report.is_none() => {
                Err(invalid(&format!("is:{}", c.as_str()), "no usage data loaded"))
            }
            _ => Ok(()),
        }
    }

    pub fn matches(&self, ctx: &FilterContext<'_>, qname: &QualifiedName) -> bool {
        let Some(el) = ctx.index.get(qname) else { return false };
        let dotted = qname.dotted().to_lowercase();
        self.terms.iter().all(|t| match t {
            Term::Name(s) => dotted.contains(s.as_str()),
            Term::Kind(k) => el.kind() == *k,
            Term::Is(c) => ctx.report.and_then(|r| r.classification(qname)) == Some(*c),
            Term::Removed => ctx.removed.covers(qname),
            Term::Completed => ctx.set.completed.contains(qname),
            Term::Annotated(k) => ctx.set.on(qname).any(|a| k.is_none_or(|k| a.kind() == k)),
        })
    }

    /// Matching classes, functions and parameters in declaration order.
    pub fn select(&self, ctx: &FilterContext<'_>) -> Result<Vec<QualifiedName>, InvalidFilter> {
        self.check(ctx)?;
        Ok(ctx.index.qnames().iter().filter(|q| self.matches(ctx, q)).cloned().collect())
    }
}
