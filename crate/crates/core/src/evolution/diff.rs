use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{ApiModel, ClassDecl, DefaultValue, ElementKind, ElementRef, FunctionDecl, ModelIndex, ParameterKind};
use crate::qname::QualifiedName;
use crate::usage::LibraryRef;

/// `old` in the previous release is called `new` in the next one. Hints on
/// modules and classes carry everything below them along.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RenameHint {
    pub old: QualifiedName,
    pub new: QualifiedName,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HintError {
    #[error("rename hint source `{0}` does not exist in the old version")]
    UnknownOld(QualifiedName),
    #[error("rename hint target `{0}` does not exist in the new version")]
    UnknownNew(QualifiedName),
    #[error("`{0}` has more than one rename hint")]
    Duplicate(QualifiedName),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("cannot diff library `{old}` against `{new}`")]
    LibraryMismatch { old: String, new: String },
    #[error(transparent)]
    Hint(#[from] HintError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "change", rename_all = "snake_case")]
pub enum FieldChange {
    Renamed { from: QualifiedName },
    ParameterAdded { name: String },
    ParameterRemoved { name: String },
    ParameterRenamed { from: String, to: String },
    /// `None` is a required parameter.
    DefaultChanged { parameter: String, old: Option<DefaultValue>, new: Option<DefaultValue> },
    KindChanged { parameter: String, old: ParameterKind, new: ParameterKind },
    ParametersReordered { old: Vec<String>, new: Vec<String> },
    SuperclassesChanged { old: Vec<String>, new: Vec<String> },
    DocstringChanged {},
}

/// A class or function present in both versions. `qname` is the new name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementChange {
    pub qname: QualifiedName,
    pub changes: Vec<FieldChange>,
}

/// Classes and functions only; parameter differences are field changes of
/// their function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiDiff {
    pub old: LibraryRef,
    pub new: LibraryRef,
    pub added: Vec<QualifiedName>,
    pub removed: Vec<QualifiedName>,
    pub changed: Vec<ElementChange>,
    #[serde(default)]
    pub rename_hints: Vec<RenameHint>,
}

impl ApiDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.changed.is_empty()
    }
}

fn check_hints(old: &ModelIndex<'_>, new: &ModelIndex<'_>, hints: &[RenameHint]) -> Result<(), HintError> {
    let mut seen = HashSet::new();
    for h in hints {
        if old.get(&h.old).is_none() {
            return Err(HintError::UnknownOld(h.old.clone()));
        }
        if new.get(&h.new).is_none() {
            return Err(HintError::UnknownNew(h.new.clone()));
        }
        if !seen.insert(&h.old) {
            return Err(HintError::Duplicate(h.old.clone()));
        }
    }
    Ok(())
}

/// Maps every class, function and parameter of `old` that survives in `new`
/// to its new name. The longest matching hint prefix decides the name;
/// without one the name is unchanged. Hinted elements claim their new name
/// first, so the mapping is injective.
pub fn element_map(old: &ApiModel, new: &ApiModel, hints: &[RenameHint]) -> Result<BTreeMap<QualifiedName, QualifiedName>, HintError> {
    let oi = ModelIndex::new(old);
    let ni = ModelIndex::new(new);
    check_hints(&oi, &ni, hints)?;
    let mut by_length: Vec<&RenameHint> = hints.iter().collect();
    by_length.sort_by_key(|h| std::cmp::Reverse(h.old.len()));

    let mut candidates: Vec<(bool, QualifiedName, QualifiedName)> = old
        .elements()
        .into_iter()
        .map(|(q, e)| {
            let hinted = by_length.iter().find_map(|h| q.rebase(&h.old, &h.new));
            let kind = e.kind();
            (hinted.is_some(), q.clone(), hinted.unwrap_or(q), kind)
        })
        .filter(|(_, _, n, kind)| ni.get(n).is_some_and(|e| e.kind() == *kind))
        .map(|(h, o, n, _)| (h, o, n))
        .collect();
    // Stable: hinted first, declaration order within each group.
    candidates.sort_by_key(|(hinted, _, _)| !hinted);

    let mut map = BTreeMap::new();
    let mut claimed = HashSet::new();
    for (_, o, n) in candidates {
        if claimed.insert(n.clone()) {
            map.insert(o, n);
        }
    }
    // A parameter only survives together with its function.
    let orphans: Vec<QualifiedName> = map
        .iter()
        .filter(|(o, n)| {
            matches!(oi.get(o), Some(ElementRef::Parameter(..))) && o.parent().and_then(|p| map.get(&p)) != n.parent().as_ref()
        })
        .map(|(o, _)| o.clone())
        .collect();
    for o in orphans {
        map.remove(&o);
    }
    Ok(map)
}

fn is_declaration(e: &ElementRef<'_>) -> bool {
    matches!(e.kind(), ElementKind::Class | ElementKind::Function)
}

pub fn diff_api(old: &ApiModel, new: &ApiModel, hints: &[RenameHint]) -> Result<ApiDiff, DiffError> {
    if old.library_name != new.library_name {
        return Err(DiffError::LibraryMismatch { old: old.library_name.clone(), new: new.library_name.clone() });
    }
    let map = element_map(old, new, hints)?;
    let matched: HashSet<&QualifiedName> = map.values().collect();
    let ni = ModelIndex::new(new);

    let mut removed = Vec::new();
    let mut changed = Vec::new();
    for (q, e) in old.elements() {
        if !is_declaration(&e) {
            continue;
        }
        let Some(n) = map.get(&q) else {
            removed.push(q);
            continue;
        };
        let mut changes = Vec::new();
        if *n != q {
            changes.push(FieldChange::Renamed { from: q.clone() });
        }
        match (e, ni.get(n)) {
            (ElementRef::Class(a), Some(ElementRef::Class(b))) => class_changes(a, b, &mut changes),
            (ElementRef::Function(a, _), Some(ElementRef::Function(b, _))) => function_changes(a, b, &map, &mut changes),
            _ => unreachable!("the element map preserves kinds"),
        }
        if !changes.is_empty() {
            changed.push(ElementChange { qname: n.clone(), changes });
        }
    }
    let added =
        new.elements().into_iter().filter(|(q, e)| is_declaration(e) && !matched.contains(q)).map(|(q, _)| q).collect();
    Ok(ApiDiff {
        old: LibraryRef { name: old.library_name.clone(), version: old.version.clone() },
        new: LibraryRef { name: new.library_name.clone(), version: new.version.clone() },
        added,
        removed,
        changed,
        rename_hints: hints.to_vec(),
    })
}

fn class_changes(a: &ClassDecl, b: &ClassDecl, out: &mut Vec<FieldChange>) {
    if a.superclasses != b.superclasses {
        out.push(FieldChange::SuperclassesChanged { old: a.superclasses.clone(), new: b.superclasses.clone() });
    }
    if a.docstring.text != b.docstring.text {
        out.push(FieldChange::DocstringChanged {});
    }
}

fn function_changes(a: &FunctionDecl, b: &FunctionDecl, map: &BTreeMap<QualifiedName, QualifiedName>, out: &mut Vec<FieldChange>) {
    let mut kept = Vec::new();
    for p in &a.parameters {
        let Some(to) = map.get(&a.param_qname(p)) else {
            out.push(FieldChange::ParameterRemoved { name: p.name.clone() });
            continue;
        };
        let q = b.param(to.name()).expect("mapped parameters exist");
        if p.name != q.name {
            out.push(FieldChange::ParameterRenamed { from: p.name.clone(), to: q.name.clone() });
        }
        if p.default() != q.default() {
            out.push(FieldChange::DefaultChanged { parameter: q.name.clone(), old: p.default().cloned(), new: q.default().cloned() });
        }
        if p.kind != q.kind {
            out.push(FieldChange::KindChanged { parameter: q.name.clone(), old: p.kind, new: q.kind });
        }
        kept.push(q.name.clone());
    }
    for q in &b.parameters {
        if !kept.contains(&q.name) {
            out.push(FieldChange::ParameterAdded { name: q.name.clone() });
        }
    }
    let new_order: Vec<String> = b.parameters.iter().map(|q| q.name.clone()).filter(|n| kept.contains(n)).collect();
    if new_order != kept {
        out.push(FieldChange::ParametersReordered { old: kept, new: new_order });
    }
    if a.docstring.text != b.docstring.text {
        out.push(FieldChange::DocstringChanged {});
    }
}
