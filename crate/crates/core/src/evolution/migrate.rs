use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::diff::{element_map, ApiDiff, HintError};
use crate::annotation::{validate, Annotation, AnnotationKind, AnnotationSet, Payload, Violation};
use crate::inference::preconditions::enum_values;
use crate::model::{ApiModel, ElementRef, ModelIndex};
use crate::qname::QualifiedName;
use crate::usage::{LibraryRef, ModelMismatch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictKind {
    BothRenamed,
    RemovedVsAnnotated,
    DefaultDivergence,
    EnumValueSetChanged,
    MovedVsMoved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conflict {
    pub id: u32,
    pub kind: ConflictKind,
    /// The element in the new version, or the old name if it is gone.
    pub element: QualifiedName,
    /// The annotation as it was in the old set.
    pub adapter_change: Annotation,
    pub maintainer_change: String,
    /// What `keep_adapter` adds; `None` when the element no longer exists.
    pub proposed: Option<Annotation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dropped {
    pub annotation: Annotation,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeResult {
    pub migrated: AnnotationSet,
    pub generated_additions: Vec<QualifiedName>,
    pub dropped: Vec<Dropped>,
    pub conflicts: Vec<Conflict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "choice", rename_all = "snake_case")]
pub enum Resolution {
    KeepAdapter,
    KeepMaintainer,
    Custom { annotation: Annotation },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MigrateError {
    #[error(transparent)]
    ModelMismatch(#[from] ModelMismatch),
    #[error("the diff does not fit these models: {0}")]
    Hint(#[from] HintError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResolveError {
    #[error("no conflict with id {0}")]
    UnknownConflict(u32),
    #[error("custom annotation does not validate: {}", list(.0))]
    InvalidCustom(Vec<Violation>),
    /// Keeping the adapter's change would leave an invalid set.
    #[error("keeping the adapter change does not validate: {}", list(.0))]
    Rejected(Vec<Violation>),
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn check(found: &LibraryRef, model: &ApiModel) -> Result<(), ModelMismatch> {
    if found.name == model.library_name && found.version == model.version {
        Ok(())
    } else {
        Err(ModelMismatch {
            expected_name: model.library_name.clone(),
            expected_version: model.version.clone(),
            found_name: found.name.clone(),
            found_version: found.version.clone(),
        })
    }
}

/// Which annotation kinds turn into a conflict rather than a silent drop
/// when the maintainer deletes their target.
fn conflicts_on_removal(kind: AnnotationKind) -> bool {
    matches!(kind, AnnotationKind::Rename | AnnotationKind::Move | AnnotationKind::Group | AnnotationKind::ReplaceWithConstant)
}

struct Migration<'a> {
    map: BTreeMap<QualifiedName, QualifiedName>,
    old: ModelIndex<'a>,
    new: ModelIndex<'a>,
    result: MergeResult,
}

enum Outcome {
    Keep(Annotation),
    Drop(String),
    Conflict { kind: ConflictKind, element: QualifiedName, maintainer: String, proposed: Option<Annotation> },
}

impl Migration<'_> {
    fn param_enum(&self, index: &ModelIndex<'_>, q: &QualifiedName) -> Option<BTreeSet<String>> {
        match index.get(q) {
            Some(ElementRef::Parameter(p, ..)) => enum_values(&p.doc_type).map(|v| v.into_iter().collect()),
            _ => None,
        }
    }

    fn migrate(&self, a: &Annotation) -> Outcome {
        let Some(n) = self.map.get(&a.target) else {
            if a.is_active() && conflicts_on_removal(a.kind()) {
                return Outcome::Conflict {
                    kind: ConflictKind::RemovedVsAnnotated,
                    element: a.target.clone(),
                    maintainer: format!("removed {}", a.target),
                    proposed: None,
                };
            }
            return Outcome::Drop(format!("{} no longer exists", a.target));
        };
        let mut moved = a.clone();
        moved.target = n.clone();
        match &mut moved.payload {
            Payload::Group { parameter_names, .. } => {
                for name in parameter_names.iter_mut() {
                    match self.map.get(&a.target.child(name)) {
                        Some(to) => *name = to.name().to_string(),
                        None if a.is_active() => {
                            return Outcome::Conflict {
                                kind: ConflictKind::RemovedVsAnnotated,
                                element: n.clone(),
                                maintainer: format!("removed parameter `{name}` of {n}"),
                                proposed: None,
                            };
                        }
                        None => return Outcome::Drop(format!("parameter `{name}` no longer exists")),
                    }
                }
            }
            Payload::DependencyNote { depends_on, .. } => {
                let Some(function) = a.target.parent() else { return Outcome::Drop("no enclosing function".into()) };
                match self.map.get(&function.child(depends_on)) {
                    Some(to) => *depends_on = to.name().to_string(),
                    None => return Outcome::Drop(format!("parameter `{depends_on}` no longer exists")),
                }
            }
            _ => {}
        }
        if !a.is_active() {
            return Outcome::Keep(moved);
        }
        let conflict = |kind, maintainer: String| Outcome::Conflict { kind, element: n.clone(), maintainer, proposed: Some(moved.clone()) };
        match &a.payload {
            Payload::Rename { new_name } if n.name() != a.target.name() => {
                if new_name == n.name() {
                    Outcome::Drop(format!("renamed to `{new_name}` upstream as well"))
                } else {
                    conflict(ConflictKind::BothRenamed, format!("renamed {} to {n}", a.target))
                }
            }
            Payload::Move { new_module } if n.parent() != a.target.parent() => {
                if n.parent().as_ref() == Some(new_module) {
                    Outcome::Drop(format!("moved to {new_module} upstream as well"))
                } else {
                    conflict(ConflictKind::MovedVsMoved, format!("moved {} to {n}", a.target))
                }
            }
            Payload::MakeOptional { default } => {
                let (Some(ElementRef::Parameter(p, ..)), Some(ElementRef::Parameter(q, ..))) = (self.old.get(&a.target), self.new.get(n)) else {
                    return Outcome::Keep(moved);
                };
                if p.default() == q.default() || q.default_literal() == Some(default) {
                    Outcome::Keep(moved)
                } else {
                    let shown = q.default().map_or_else(|| "required".to_string(), |d| format!("default {}", d.source()));
                    conflict(ConflictKind::DefaultDivergence, format!("changed {n} to {shown}"))
                }
            }
            Payload::ReplaceWithEnum { members, .. } => {
                let before = self.param_enum(&self.old, &a.target);
                let after = self.param_enum(&self.new, n);
                let ours: BTreeSet<String> = members.iter().map(|m| m.value.clone()).collect();
                match after {
                    Some(after) if Some(&after) != before.as_ref() && after != ours => conflict(
                        ConflictKind::EnumValueSetChanged,
                        format!("documented values of {n} are now {{{}}}", after.into_iter().collect::<Vec<_>>().join(", ")),
                    ),
                    _ => Outcome::Keep(moved),
                }
            }
            _ => Outcome::Keep(moved),
        }
    }
}

/// Rebases `set` from `old_model` onto `new_model` following the element
/// mapping of `diff`. Annotations that end up invalid against the new model
/// are dropped with the violation as reason.
pub fn migrate_annotations(set: &AnnotationSet, diff: &ApiDiff, old_model: &ApiModel, new_model: &ApiModel) -> Result<MergeResult, MigrateError> {
    check(&set.library, old_model)?;
    check(&diff.old, old_model)?;
    check(&diff.new, new_model)?;
    let map = element_map(old_model, new_model, &diff.rename_hints)?;
    let new = ModelIndex::new(new_model);
    let generated_additions =
        diff.added.iter().filter(|q| new.get(q).is_some_and(|e| e.is_public())).cloned().collect();
    let mut m = Migration {
        old: ModelIndex::new(old_model),
        new,
        result: MergeResult {
            migrated: AnnotationSet::new(new_model),
            generated_additions,
            dropped: Vec::new(),
            conflicts: Vec::new(),
        },
        map,
    };
    for a in &set.annotations {
        match m.migrate(a) {
            Outcome::Keep(b) => m.result.migrated.annotations.push(b),
            Outcome::Drop(reason) => m.result.dropped.push(Dropped { annotation: a.clone(), reason }),
            Outcome::Conflict { kind, element, maintainer, proposed } => {
                let id = m.result.conflicts.len() as u32 + 1;
                m.result.conflicts.push(Conflict { id, kind, element, adapter_change: a.clone(), maintainer_change: maintainer, proposed });
            }
        }
    }
    m.result.migrated.completed = set.completed.iter().filter_map(|q| m.map.get(q).cloned()).collect();
    let mut result = m.result;
    prune_invalid(&mut result, new_model);
    Ok(result)
}

/// Moves annotations named by violations to `dropped` until the set validates.
fn prune_invalid(result: &mut MergeResult, model: &ApiModel) {
    loop {
        let violations = validate(&result.migrated, model);
        if violations.is_empty() {
            return;
        }
        let before = result.migrated.annotations.len();
        let (bad, good): (Vec<_>, Vec<_>) = std::mem::take(&mut result.migrated.annotations)
            .into_iter()
            .partition(|a| violations.iter().any(|v| v.target == a.target && v.kind.is_none_or(|k| k == a.kind())));
        result.migrated.annotations = good;
        for a in bad {
            let reason = violations.iter().find(|v| v.target == a.target).map(|v| v.message.clone()).unwrap_or_default();
            result.dropped.push(Dropped { annotation: a, reason });
        }
        if result.migrated.annotations.len() == before {
            return;
        }
    }
}

/// Settles one conflict. The result is unchanged on error.
pub fn resolve_conflict(result: &MergeResult, conflict_id: u32, choice: &Resolution, new_model: &ApiModel) -> Result<MergeResult, ResolveError> {
    let i = result.conflicts.iter().position(|c| c.id == conflict_id).ok_or(ResolveError::UnknownConflict(conflict_id))?;
    let mut out = result.clone();
    let conflict = out.conflicts.remove(i);
    let added = match choice {
        Resolution::KeepMaintainer => {
            out.dropped.push(Dropped { annotation: conflict.adapter_change, reason: "resolved for the maintainer".into() });
            None
        }
        Resolution::KeepAdapter => match conflict.proposed {
            Some(a) => Some(a),
            None => {
                out.dropped.push(Dropped { annotation: conflict.adapter_change, reason: format!("{} no longer exists", conflict.element) });
                None
            }
        },
        Resolution::Custom { annotation } => Some(annotation.clone()),
    };
    if let Some(a) = added {
        out.migrated.annotations.push(a);
        let violations = validate(&out.migrated, new_model);
        if !violations.is_empty() {
            return Err(match choice {
                Resolution::Custom { .. } => ResolveError::InvalidCustom(violations),
                _ => ResolveError::Rejected(violations),
            });
        }
    }
    Ok(out)
}
