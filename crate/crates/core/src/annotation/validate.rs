use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Annotation, AnnotationKind, AnnotationSet, Payload};
use crate::model::{is_public_name, ApiModel, ElementKind, ElementRef, ModelIndex};
use crate::qname::{is_python_name, QualifiedName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationCode {
    VersionMismatch,
    DanglingTarget,
    KindMismatch,
    DuplicateKind,
    RemoveExcludesOthers,
    NameCollision,
    InvalidIdentifier,
    InvalidEnum,
    InvalidInterval,
    InvalidPayload,
    CompletedElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub target: QualifiedName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<AnnotationKind>,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, target: &QualifiedName, kind: Option<AnnotationKind>, message: impl Into<String>) -> Self {
        Violation { code, target: target.clone(), kind, message: message.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            Some(k) => write!(f, "{:?} on {} ({k}): {}", self.code, self.target, self.message),
            None => write!(f, "{:?} on {}: {}", self.code, self.target, self.message),
        }
    }
}

/// Returns every consistency problem of `set` against `model`. Parameter
/// order is deliberately not checked: generation reorders.
pub fn validate(set: &AnnotationSet, model: &ApiModel) -> Vec<Violation> {
    let index = ModelIndex::new(model);
    let mut out = Vec::new();
    // Decoded models have valid names; hand-built ones might not.
    let lib_root: QualifiedName = model
        .library_name
        .parse()
        .unwrap_or_else(|_| QualifiedName::new(["library"]).expect("valid identifier"));
    if set.library.name != model.library_name || set.library.version != model.version {
        out.push(Violation::new(
            ViolationCode::VersionMismatch,
            &lib_root,
            None,
            format!(
                "annotations are for {} {}, model is {} {}",
                set.library.name, set.library.version, model.library_name, model.version
            ),
        ));
    }
    for q in &set.completed {
        if index.get(q).is_none() {
            out.push(Violation::new(ViolationCode::DanglingTarget, q, None, "completed element does not exist"));
        }
    }
    let mut seen: HashSet<(&QualifiedName, AnnotationKind)> = HashSet::new();
    for a in &set.annotations {
        out.extend(validate_annotation(a, &index));
        if !seen.insert((&a.target, a.kind())) {
            out.push(Violation::new(ViolationCode::DuplicateKind, &a.target, Some(a.kind()), "duplicate annotation kind on one element"));
        }
    }
    let removed: HashSet<&QualifiedName> =
        set.active().filter(|a| a.kind() == AnnotationKind::Remove).map(|a| &a.target).collect();
    for a in set.active() {
        if a.kind() != AnnotationKind::Remove && removed.contains(&a.target) {
            out.push(Violation::new(
                ViolationCode::RemoveExcludesOthers,
                &a.target,
                Some(a.kind()),
                "a removed element cannot carry other annotations",
            ));
        }
    }
    out.extend(name_collisions(set, &index));
    out
}

/// Checks of a single annotation that need no other annotations.
pub fn validate_annotation(a: &Annotation, index: &ModelIndex<'_>) -> Vec<Violation> {
    let kind = a.kind();
    let mut out = Vec::new();
    let mut bad = |code, message: String| out.push(Violation::new(code, &a.target, Some(kind), message));
    let Some(element) = index.get(&a.target) else {
        bad(ViolationCode::DanglingTarget, format!("`{}` does not exist", a.target));
        return out;
    };
    if !kind.targets().contains(&element.kind()) {
        bad(ViolationCode::KindMismatch, format!("{kind} cannot target a {}", element.kind().as_str()));
        return out;
    }
    match element {
        ElementRef::Parameter(p, ..) if p.kind.is_variadic() && kind != AnnotationKind::Rename => {
            bad(ViolationCode::KindMismatch, format!("{kind} cannot target variadic parameter `{}`", p.name));
        }
        ElementRef::Function(f, _) if f.is_init() && matches!(kind, AnnotationKind::Remove | AnnotationKind::Rename) => {
            bad(ViolationCode::KindMismatch, format!("{kind} cannot target a constructor"));
        }
        ElementRef::Function(_, Some(_)) if kind == AnnotationKind::Move => {
            bad(ViolationCode::KindMismatch, "methods cannot be moved".into());
        }
        _ => {}
    }
    let model = index.model;
    match &a.payload {
        Payload::Rename { new_name } => {
            if !is_python_name(new_name) {
                bad(ViolationCode::InvalidIdentifier, format!("`{new_name}` is not a valid identifier"));
            } else if element.kind() != ElementKind::Parameter && !is_public_name(new_name) {
                bad(ViolationCode::InvalidIdentifier, format!("`{new_name}` would not be public"));
            }
        }
        Payload::Move { new_module } => {
            let root = QualifiedName::new(model.library_name.split('.')).expect("valid library name");
            if !new_module.starts_with(&root) {
                bad(ViolationCode::InvalidPayload, format!("`{new_module}` is outside `{root}`"));
            } else if new_module.segments().iter().any(|s| !is_python_name(s)) {
                bad(ViolationCode::InvalidIdentifier, format!("`{new_module}` is not a valid module name"));
            }
        }
        Payload::ReplaceWithEnum { enum_name, members } => {
            if !is_python_name(enum_name) {
                bad(ViolationCode::InvalidIdentifier, format!("`{enum_name}` is not a valid identifier"));
            }
            if members.is_empty() {
                bad(ViolationCode::InvalidEnum, "an enum needs at least one member".into());
            }
            let mut names = HashSet::new();
            let mut values = HashSet::new();
            for m in members {
                if !is_python_name(&m.name) || m.name == "value" || m.name == "name" || m.name.starts_with('_') {
                    bad(ViolationCode::InvalidIdentifier, format!("`{}` is not a valid member name", m.name));
                }
                if !names.insert(&m.name) {
                    bad(ViolationCode::InvalidEnum, format!("member `{}` appears twice", m.name));
                }
                if !values.insert(&m.value) {
                    bad(ViolationCode::InvalidEnum, format!("value {:?} appears twice", m.value));
                }
            }
        }
        Payload::AddBoundsCheck { min, min_exclusive, max, max_exclusive } => {
            let nan = min.is_some_and(f64::is_nan) || max.is_some_and(f64::is_nan);
            let empty = match (min, max) {
                (Some(lo), Some(hi)) => lo > hi || (lo == hi && (*min_exclusive || *max_exclusive)),
                _ => false,
            };
            if nan || empty || min.is_some_and(f64::is_infinite) || max.is_some_and(f64::is_infinite) {
                bad(ViolationCode::InvalidInterval, "the interval is empty or malformed".into());
            }
        }
        Payload::Group { group_class_name, parameter_names, new_parameter_name } => {
            for name in [group_class_name, new_parameter_name] {
                if !is_python_name(name) {
                    bad(ViolationCode::InvalidIdentifier, format!("`{name}` is not a valid identifier"));
                }
            }
            if let ElementRef::Function(f, _) = element {
                if parameter_names.len() < 2 {
                    bad(ViolationCode::InvalidPayload, "a group needs at least two parameters".into());
                }
                let mut seen = HashSet::new();
                for n in parameter_names {
                    match f.param(n) {
                        Some(p) if !p.kind.is_variadic() => {}
                        Some(_) => bad(ViolationCode::InvalidPayload, format!("variadic `{n}` cannot be grouped")),
                        None => bad(ViolationCode::DanglingTarget, format!("`{n}` is not a parameter of `{}`", f.qname)),
                    }
                    if !seen.insert(n) {
                        bad(ViolationCode::InvalidPayload, format!("`{n}` is listed twice"));
                    }
                }
            }
        }
        Payload::DependencyNote { depends_on, .. } => {
            if let ElementRef::Parameter(p, f, _) = element {
                if depends_on == &p.name || f.param(depends_on).is_none() {
                    bad(ViolationCode::InvalidPayload, format!("`{depends_on}` is not another parameter of `{}`", f.qname));
                }
            }
        }
        Payload::Remove {}
        | Payload::ReplaceWithConstant { .. }
        | Payload::MakeOptional { .. }
        | Payload::MakeRequired {}
        | Payload::DocstringOverride { .. } => {}
    }
    out
}

/// Final names in each namespace after active Remove, ReplaceWithConstant,
/// Group, Rename and Move annotations.
fn name_collisions(set: &AnnotationSet, index: &ModelIndex<'_>) -> Vec<Violation> {
    let model = index.model;
    let active: HashMap<(&QualifiedName, AnnotationKind), &Annotation> =
        set.active().map(|a| ((&a.target, a.kind()), a)).collect();
    let has = |q: &QualifiedName, k| active.contains_key(&(q, k));
    let removed = set.removed();
    let renamed = |q: &QualifiedName, original: &str| -> String {
        match active.get(&(q, AnnotationKind::Rename)).map(|a| &a.payload) {
            Some(Payload::Rename { new_name }) => new_name.clone(),
            _ => original.to_string(),
        }
    };
    // namespace → name → elements claiming it
    let mut spaces: BTreeMap<QualifiedName, BTreeMap<String, Vec<QualifiedName>>> = BTreeMap::new();
    let mut claim = |space: &QualifiedName, name: String, who: &QualifiedName| {
        spaces.entry(space.clone()).or_default().entry(name).or_default().push(who.clone());
    };
    for m in &model.modules {
        for r in &m.reexports {
            claim(&m.qname, r.name.clone(), &m.qname.child(&r.name));
        }
        let decls = m.classes.iter().map(|c| &c.qname).chain(m.functions.iter().map(|f| &f.qname));
        for q in decls {
            if removed.covers(q) {
                continue;
            }
            let space = match active.get(&(q, AnnotationKind::Move)).map(|a| &a.payload) {
                Some(Payload::Move { new_module }) => new_module.clone(),
                _ => m.qname.clone(),
            };
            claim(&space, renamed(q, q.name()), q);
        }
        for c in &m.classes {
            for f in &c.methods {
                if !removed.covers(&f.qname) {
                    claim(&c.qname, renamed(&f.qname, f.name()), &f.qname);
                }
            }
        }
    }
    for (f, _) in model.functions() {
        if removed.covers(&f.qname) {
            continue;
        }
        let grouped: Vec<&String> = match active.get(&(&f.qname, AnnotationKind::Group)).map(|a| &a.payload) {
            Some(Payload::Group { parameter_names, new_parameter_name, .. }) => {
                claim(&f.qname, new_parameter_name.clone(), &f.qname);
                parameter_names.iter().collect()
            }
            _ => Vec::new(),
        };
        for p in &f.parameters {
            let q = f.param_qname(p);
            if has(&q, AnnotationKind::ReplaceWithConstant) || grouped.contains(&&p.name) {
                continue;
            }
            claim(&f.qname, renamed(&q, &p.name), &q);
        }
    }
    let mut out = Vec::new();
    for (space, names) in spaces {
        for (name, claimants) in names {
            if claimants.len() < 2 {
                continue;
            }
            // Report on the annotated elements that caused the clash.
            for who in &claimants {
                let cause = [AnnotationKind::Rename, AnnotationKind::Move, AnnotationKind::Group]
                    .into_iter()
                    .find(|k| has(who, *k));
                if let Some(kind) = cause {
                    out.push(Violation::new(
                        ViolationCode::NameCollision,
                        who,
                        Some(kind),
                        format!("`{name}` is already taken in `{space}`"),
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::EnumMember;
    use crate::extract::extract_source;
    use crate::literal::LiteralValue;

    fn model() -> ApiModel {
        let src = "def f(a, b=1, *args): ...\ndef g(): ...\nclass C:\n    def __init__(self, x): ...\n    def run(self): ...\n";
        ApiModel {
            library_name: "lib".into(),
            version: "1".into(),
            modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), src).0],
        }
    }

    fn codes(payloads: Vec<(&str, Payload)>) -> Vec<ViolationCode> {
        let m = model();
        let mut set = AnnotationSet::new(&m);
        for (t, p) in payloads {
            set.annotations.push(Annotation::manual(t.parse().unwrap(), p, "t"));
        }
        validate(&set, &m).into_iter().map(|v| v.code).collect()
    }

    fn rename(n: &str) -> Payload {
        Payload::Rename { new_name: n.into() }
    }

    #[test]
    fn empty_set_is_valid() {
        assert!(codes(vec![]).is_empty());
    }

    #[test]
    fn rename_onto_existing_sibling_collides() {
        assert_eq!(codes(vec![("lib.m.f", rename("g"))]), [ViolationCode::NameCollision]);
        // swapping names is fine
        assert!(codes(vec![("lib.m.f", rename("g")), ("lib.m.g", rename("f"))]).is_empty());
        // a removed sibling frees its name
        assert!(codes(vec![("lib.m.f", rename("g")), ("lib.m.g", Payload::Remove {})]).is_empty());
        assert_eq!(codes(vec![("lib.m.f.a", rename("b"))]), [ViolationCode::NameCollision]);
        assert!(codes(vec![("lib.m.f.a", rename("b")), ("lib.m.f.b", Payload::ReplaceWithConstant { value: LiteralValue::int(1) })]).is_empty());
    }

    #[test]
    fn kind_mismatches() {
        assert_eq!(codes(vec![("lib.m.C", Payload::MakeOptional { default: LiteralValue::int(0) })]), [ViolationCode::KindMismatch]);
        assert_eq!(codes(vec![("lib.m.C.__init__", Payload::Remove {})]), [ViolationCode::KindMismatch]);
        assert_eq!(codes(vec![("lib.m.f.args", Payload::MakeRequired {})]), [ViolationCode::KindMismatch]);
        assert_eq!(codes(vec![("lib.m.C.run", Payload::Move { new_module: "lib.other".parse().unwrap() })]), [ViolationCode::KindMismatch]);
        assert_eq!(codes(vec![("lib.m.nope", Payload::Remove {})]), [ViolationCode::DanglingTarget]);
    }

    #[test]
    fn duplicates_and_remove_exclusion() {
        let dup = codes(vec![("lib.m.f", rename("h")), ("lib.m.f", rename("k"))]);
        assert!(dup.contains(&ViolationCode::DuplicateKind));
        assert_eq!(codes(vec![("lib.m.f", Payload::Remove {}), ("lib.m.f", rename("h"))]), [ViolationCode::RemoveExcludesOthers]);
        // annotations below a removed element are allowed and ignored later
        assert!(codes(vec![("lib.m.f", Payload::Remove {}), ("lib.m.f.a", rename("z"))]).is_empty());
    }

    #[test]
    fn payload_checks() {
        assert_eq!(codes(vec![("lib.m.f", rename("class"))]), [ViolationCode::InvalidIdentifier]);
        let members = vec![EnumMember { name: "A".into(), value: "x".into() }, EnumMember { name: "B".into(), value: "x".into() }];
        assert_eq!(codes(vec![("lib.m.f.a", Payload::ReplaceWithEnum { enum_name: "E".into(), members })]), [ViolationCode::InvalidEnum]);
        let empty = Payload::AddBoundsCheck { min: Some(1.0), min_exclusive: true, max: Some(1.0), max_exclusive: false };
        assert_eq!(codes(vec![("lib.m.f.a", empty)]), [ViolationCode::InvalidInterval]);
        let point = Payload::AddBoundsCheck { min: Some(1.0), min_exclusive: false, max: Some(1.0), max_exclusive: false };
        assert!(codes(vec![("lib.m.f.a", point)]).is_empty());
        assert_eq!(codes(vec![("lib.m.g", Payload::Move { new_module: "other.m".parse().unwrap() })]), [ViolationCode::InvalidPayload]);
        let group = Payload::Group { group_class_name: "G".into(), parameter_names: vec!["a".into(), "zz".into()], new_parameter_name: "g".into() };
        assert_eq!(codes(vec![("lib.m.f", group)]), [ViolationCode::DanglingTarget]);
    }

    #[test]
    fn moves_collide_in_the_target_module() {
        let to = |m: &str| Payload::Move { new_module: m.parse().unwrap() };
        assert!(codes(vec![("lib.m.g", to("lib.n"))]).is_empty());
        let c = codes(vec![("lib.m.g", to("lib.n")), ("lib.m.f", to("lib.n")), ("lib.m.f", rename("g"))]);
        assert!(c.contains(&ViolationCode::NameCollision));
    }
}
