//! API transformations recorded as annotations on API elements.

mod batch;
pub mod filter;
mod merge;
mod validate;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::literal::LiteralValue;
use crate::model::{ApiModel, ElementKind, SchemaError};
use crate::qname::QualifiedName;
use crate::usage::LibraryRef;

pub use batch::{batch_annotate, BatchOutcome, Skipped};
pub use filter::{Filter, FilterContext, InvalidFilter};
pub use merge::{merge_annotation_sets, MergeConflict, MergeConflictKind, MergeOutcome, VersionMismatch};
pub use validate::{validate, validate_annotation, Violation, ViolationCode};

pub const ANNOTATION_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumMember {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Payload {
    Remove {},
    ReplaceWithConstant { value: LiteralValue },
    MakeOptional { default: LiteralValue },
    MakeRequired {},
    /// `None` bounds are unbounded.
    AddBoundsCheck { min: Option<f64>, min_exclusive: bool, max: Option<f64>, max_exclusive: bool },
    ReplaceWithEnum { enum_name: String, members: Vec<EnumMember> },
    Rename { new_name: String },
    Move { new_module: QualifiedName },
    Group { group_class_name: String, parameter_names: Vec<String>, new_parameter_name: String },
    DependencyNote { depends_on: String, condition_text: String },
    DocstringOverride { text: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnnotationKind {
    Remove,
    ReplaceWithConstant,
    MakeOptional,
    MakeRequired,
    AddBoundsCheck,
    ReplaceWithEnum,
    Rename,
    Move,
    Group,
    DependencyNote,
    DocstringOverride,
}

impl AnnotationKind {
    pub const ALL: [AnnotationKind; 11] = [
        AnnotationKind::Remove,
        AnnotationKind::ReplaceWithConstant,
        AnnotationKind::MakeOptional,
        AnnotationKind::MakeRequired,
        AnnotationKind::AddBoundsCheck,
        AnnotationKind::ReplaceWithEnum,
        AnnotationKind::Rename,
        AnnotationKind::Move,
        AnnotationKind::Group,
        AnnotationKind::DependencyNote,
        AnnotationKind::DocstringOverride,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationKind::Remove => "Remove",
            AnnotationKind::ReplaceWithConstant => "ReplaceWithConstant",
            AnnotationKind::MakeOptional => "MakeOptional",
            AnnotationKind::MakeRequired => "MakeRequired",
            AnnotationKind::AddBoundsCheck => "AddBoundsCheck",
            AnnotationKind::ReplaceWithEnum => "ReplaceWithEnum",
            AnnotationKind::Rename => "Rename",
            AnnotationKind::Move => "Move",
            AnnotationKind::Group => "Group",
            AnnotationKind::DependencyNote => "DependencyNote",
            AnnotationKind::DocstringOverride => "DocstringOverride",
        }
    }

    /// Element kinds this annotation may target.
    pub fn targets(self) -> &'static [ElementKind] {
        use ElementKind::*;
        match self {
            AnnotationKind::Remove | AnnotationKind::DocstringOverride => &[Class, Function],
            AnnotationKind::Move => &[Class, Function],
            AnnotationKind::Rename => &[Class, Function, Parameter],
            AnnotationKind::Group => &[Function],
            AnnotationKind::ReplaceWithConstant
            | AnnotationKind::MakeOptional
            | AnnotationKind::MakeRequired
            | AnnotationKind::AddBoundsCheck
            | AnnotationKind::ReplaceWithEnum
            | AnnotationKind::DependencyNote => &[Parameter],
        }
    }
}

impl fmt::Display for AnnotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnnotationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        AnnotationKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown annotation kind `{s}`"))
    }
}

impl Payload {
    pub fn kind(&self) -> AnnotationKind {
        match self {
            Payload::Remove {} => AnnotationKind::Remove,
            Payload::ReplaceWithConstant { .. } => AnnotationKind::ReplaceWithConstant,
            Payload::MakeOptional { .. } => AnnotationKind::MakeOptional,
            Payload::MakeRequired {} => AnnotationKind::MakeRequired,
            Payload::AddBoundsCheck { .. } => AnnotationKind::AddBoundsCheck,
            Payload::ReplaceWithEnum { .. } => AnnotationKind::ReplaceWithEnum,
            Payload::Rename { .. } => AnnotationKind::Rename,
            Payload::Move { .. } => AnnotationKind::Move,
            Payload::Group { .. } => AnnotationKind::Group,
            Payload::DependencyNote { .. } => AnnotationKind::DependencyNote,
            Payload::DocstringOverride { .. } => AnnotationKind::DocstringOverride,
        }
    }
}

/// Renders an interval such as `(0, inf)` or `[1, 10]`.
pub fn interval_notation(min: Option<f64>, min_exclusive: bool, max: Option<f64>, max_exclusive: bool) -> String {
    let lo = match min {
        Some(v) => format!("{}{}", if min_exclusive { '(' } else { '[' }, number_text(v)),
        None => "(-inf".to_string(),
    };
    let hi = match max {
        Some(v) => format!("{}{}", number_text(v), if max_exclusive { ')' } else { ']' }),
        None => "inf)".to_string(),
    };
    format!("{lo}, {hi}")
}

/// Integral values print without a fractional part.
pub fn number_text(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// `evidence` is the text or data that triggered the rule.
    Inferred { rule: String, evidence: String },
    Manual { author: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Review {
    #[default]
    Unreviewed,
    Correct,
    Unsure,
    Wrong,
}

impl Review {
    /// wrong > unsure > correct > unreviewed
    pub fn severity(self) -> u8 {
        match self {
            Review::Unreviewed => 0,
            Review::Correct => 1,
            Review::Unsure => 2,
            Review::Wrong => 3,
        }
    }

    pub fn most_severe(self, other: Review) -> Review {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub target: QualifiedName,
    #[serde(flatten)]
    pub payload: Payload,
    pub origin: Origin,
    #[serde(default)]
    pub review: Review,
}

impl Annotation {
    pub fn new(target: QualifiedName, payload: Payload, origin: Origin) -> Self {
        Annotation { target, payload, origin, review: Review::Unreviewed }
    }

    pub fn manual(target: QualifiedName, payload: Payload, author: &str) -> Self {
        Annotation::new(target, payload, Origin::Manual { author: author.to_string() })
    }

    pub fn inferred(target: QualifiedName, payload: Payload, rule: &str, evidence: impl Into<String>) -> Self {
        Annotation::new(target, payload, Origin::Inferred { rule: rule.to_string(), evidence: evidence.into() })
    }

    pub fn kind(&self) -> AnnotationKind {
        self.payload.kind()
    }

    /// Annotations reviewed as wrong are kept but have no effect.
    pub fn is_active(&self) -> bool {
        self.review != Review::Wrong
    }
}

/// Targets of active Remove annotations.
pub struct RemovedSet(std::collections::HashSet<QualifiedName>);

impl RemovedSet {
    /// Whether `qname` or one of its ancestors is removed.
    pub fn covers(&self, qname: &QualifiedName) -> bool {
        let mut q = Some(qname.clone());
        while let Some(cur) = q {
            if self.0.contains(&cur) {
                return true;
            }
            q = cur.parent();
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotationSet {
    pub library: LibraryRef,
    pub annotations: Vec<Annotation>,
    pub completed: BTreeSet<QualifiedName>,
}

#[derive(Serialize, Deserialize)]
struct AnnotationDocument<A, C> {
    schema_version: u32,
    library: LibraryRef,
    annotations: A,
    completed: C,
}

impl AnnotationSet {
    pub fn new(model: &ApiModel) -> Self {
        AnnotationSet {
            library: LibraryRef { name: model.library_name.clone(), version: model.version.clone() },
            annotations: Vec::new(),
            completed: BTreeSet::new(),
        }
    }

    pub fn active(&self) -> impl Iterator<Item = &Annotation> {
        self.annotations.iter().filter(|a| a.is_active())
    }

    pub fn find(&self, target: &QualifiedName, kind: AnnotationKind) -> Option<&Annotation> {
        self.annotations.iter().find(|a| &a.target == target && a.kind() == kind)
    }

    pub fn find_mut(&mut self, target: &QualifiedName, kind: AnnotationKind) -> Option<&mut Annotation> {
        self.annotations.iter_mut().find(|a| &a.target == target && a.kind() == kind)
    }

    pub fn on<'a>(&'a self, target: &'a QualifiedName) -> impl Iterator<Item = &'a Annotation> + 'a {
        self.annotations.iter().filter(move |a| &a.target == target)
    }

    /// Whether `qname` or one of its ancestors carries an active Remove.
    pub fn is_removed(&self, qname: &QualifiedName) -> bool {
        self.active().any(|a| a.kind() == AnnotationKind::Remove && qname.starts_with(&a.target))
    }

    pub fn removed(&self) -> RemovedSet {
        RemovedSet(self.active().filter(|a| a.kind() == AnnotationKind::Remove).map(|a| a.target.clone()).collect())
    }

    /// Adds an annotation after checking that the element is not marked
    /// complete and that the result still validates.
    pub fn add(&mut self, model: &ApiModel, annotation: Annotation) -> Result<(), Vec<Violation>> {
        if self.completed.contains(&annotation.target) {
            return Err(vec![Violation::new(
                ViolationCode::CompletedElement,
                &annotation.target,
                Some(annotation.kind()),
                "element is marked complete",
            )]);
        }
        self.annotations.push(annotation);
        let violations = validate(self, model);
        if violations.is_empty() {
            Ok(())
        } else {
            self.annotations.pop();
            Err(violations)
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("annotations serialize");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SchemaError> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

impl Serialize for AnnotationSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        AnnotationDocument {
            schema_version: ANNOTATION_SCHEMA_VERSION,
            library: self.library.clone(),
            annotations: &self.annotations,
            completed: &self.completed,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AnnotationSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = AnnotationDocument::<Vec<Annotation>, BTreeSet<QualifiedName>>::deserialize(deserializer)?;
        if doc.schema_version != ANNOTATION_SCHEMA_VERSION {
            return Err(D::Error::custom(format!("unsupported schema_version {}", doc.schema_version)));
        }
        if doc.library.name.parse::<QualifiedName>().is_err() {
            return Err(D::Error::custom(format!("invalid library name `{}`", doc.library.name)));
        }
        for a in &doc.annotations {
            if let Payload::AddBoundsCheck { min, max, .. } = &a.payload {
                if min.is_some_and(f64::is_nan) || max.is_some_and(f64::is_nan) {
                    return Err(D::Error::custom("bounds must be numbers"));
                }
            }
        }
        Ok(AnnotationSet { library: doc.library, annotations: doc.annotations, completed: doc.completed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set() -> AnnotationSet {
        AnnotationSet {
            library: LibraryRef { name: "lib".into(), version: "1".into() },
            annotations: vec![],
            completed: BTreeSet::new(),
        }
    }

    #[test]
    fn json_shape() {
        let mut s = set();
        s.annotations.push(Annotation::inferred(
            "lib.m.f.C".parse().unwrap(),
            Payload::AddBoundsCheck { min: Some(0.0), min_exclusive: true, max: None, max_exclusive: false },
            "bounds.strictly_positive",
            "Must be strictly positive.",
        ));
        s.annotations.push(Annotation::manual("lib.m.f".parse().unwrap(), Payload::Remove {}, "ann"));
        s.completed.insert("lib.m.g".parse().unwrap());
        let text = s.to_json();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        let a = &json["annotations"][0];
        assert_eq!(a["kind"], "AddBoundsCheck");
        assert_eq!(a["target"], "lib.m.f.C");
        assert_eq!(a["max"], serde_json::Value::Null);
        assert_eq!(a["origin"]["inferred"]["rule"], "bounds.strictly_positive");
        assert_eq!(a["review"], "unreviewed");
        assert_eq!(json["annotations"][1]["origin"]["manual"]["author"], "ann");
        assert_eq!(json["completed"][0], "lib.m.g");
        let back = AnnotationSet::from_json(text.as_bytes()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn interval_rendering() {
        assert_eq!(interval_notation(Some(0.0), true, None, false), "(0, inf)");
        assert_eq!(interval_notation(Some(0.5), false, Some(1.0), false), "[0.5, 1]");
        assert_eq!(interval_notation(None, false, Some(-2.0), true), "(-inf, -2)");
    }

    #[test]
    fn review_severity_order() {
        assert_eq!(Review::Correct.most_severe(Review::Unsure), Review::Unsure);
        assert_eq!(Review::Wrong.most_severe(Review::Unsure), Review::Wrong);
        assert_eq!(Review::Unreviewed.most_severe(Review::Correct), Review::Correct);
    }

    #[test]
    fn invalid_library_name_is_rejected() {
        let doc = r#"{"schema_version": 1, "library": {"name": "a..b", "version": "1"}, "annotations": [], "completed": []}"#;
        assert!(AnnotationSet::from_json(doc.as_bytes()).is_err());
        let ok = doc.replace("a..b", "a.b");
        assert!(AnnotationSet::from_json(ok.as_bytes()).is_ok());
    }

    fn arb_payload() -> impl Strategy<Value = Payload> {
        let ident = "[a-z_][a-z0-9_]{0,6}";
        prop_oneof![
            Just(Payload::Remove {}),
            any::<i64>().prop_map(|i| Payload::ReplaceWithConstant { value: LiteralValue::int(i as i128) }),
            ".*".prop_map(|s: String| Payload::MakeOptional { default: LiteralValue::string(&s) }),
            Just(Payload::MakeRequired {}),
            (proptest::option::of(-1e9f64..1e9), any::<bool>(), proptest::option::of(-1e9f64..1e9), any::<bool>())
                .prop_map(|(min, min_exclusive, max, max_exclusive)| Payload::AddBoundsCheck { min, min_exclusive, max, max_exclusive }),
            (ident, proptest::collection::vec((ident, ".*"), 0..4)).prop_map(|(enum_name, m)| Payload::ReplaceWithEnum {
                enum_name,
                members: m.into_iter().map(|(name, value)| EnumMember { name, value }).collect(),
            }),
            ident.prop_map(|new_name| Payload::Rename { new_name }),
            ident.prop_map(|m| Payload::Move { new_module: format!("lib.{m}").parse().unwrap() }),
            (ident, proptest::collection::vec(ident, 0..3), ident).prop_map(|(g, p, n)| Payload::Group {
                group_class_name: g,
                parameter_names: p,
                new_parameter_name: n,
            }),
            (ident, ".*").prop_map(|(d, c)| Payload::DependencyNote { depends_on: d, condition_text: c }),
            ".*".prop_map(|text| Payload::DocstringOverride { text }),
        ]
    }

    proptest! {
        #[test]
        fn serialization_round_trips_bit_exactly(
            payloads in proptest::collection::vec(arb_payload(), 0..6),
            review in prop_oneof![Just(Review::Unreviewed), Just(Review::Correct), Just(Review::Unsure), Just(Review::Wrong)],
        ) {
            let mut s = set();
            for (i, p) in payloads.into_iter().enumerate() {
                let mut a = Annotation::manual(format!("lib.m.f{i}").parse().unwrap(), p, "x");
                a.review = review;
                s.annotations.push(a);
            }
            let text = s.to_json();
            let back = AnnotationSet::from_json(text.as_bytes()).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
