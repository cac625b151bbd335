use serde::{Deserialize, Serialize};

use super::{Annotation, AnnotationKind, AnnotationSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot merge annotations for {left} with annotations for {right}")]
pub struct VersionMismatch {
    pub left: String,
    pub right: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeConflictKind {
    /// Same target and kind, different payloads.
    PayloadMismatch,
    /// One side removes an element the other side annotates.
    RemoveExclusion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeConflict {
    pub kind: MergeConflictKind,
    pub left: Annotation,
    pub right: Annotation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeOutcome {
    pub merged: AnnotationSet,
    pub conflicts: Vec<MergeConflict>,
}

/// Unions two annotation sets. Conflicting annotations are left out of
/// `merged` and reported instead, which keeps the merge commutative.
pub fn merge_annotation_sets(a: &AnnotationSet, b: &AnnotationSet) -> Result<MergeOutcome, VersionMismatch> {
    if a.library != b.library {
        return Err(VersionMismatch {
            left: format!("{} {}", a.library.name, a.library.version),
            right: format!("{} {}", b.library.name, b.library.version),
        });
    }
    let on = |s: &AnnotationSet, x: &Annotation| s.annotations.iter().any(|y| y.target == x.target && y.payload == x.payload);
    // Union keyed by (target, payload); reviews take the most severe.
    let mut union: Vec<Annotation> = Vec::new();
    for x in a.annotations.iter().chain(&b.annotations) {
        match union.iter_mut().find(|y| y.target == x.target && y.payload == x.payload) {
            Some(y) => y.review = y.review.most_severe(x.review),
            None => union.push(x.clone()),
        }
    }
    let mut conflicts = Vec::new();
    let mut excluded = vec![false; union.len()];
    for i in 0..union.len() {
        for j in i + 1..union.len() {
            let (x, y) = (&union[i], &union[j]);
            if x.target == y.target && x.kind() == y.kind() {
                let (left, right) = if on(a, x) { (x, y) } else { (y, x) };
                conflicts.push(MergeConflict { kind: MergeConflictKind::PayloadMismatch, left: left.clone(), right: right.clone() });
                excluded[i] = true;
                excluded[j] = true;
            }
        }
    }
    // A Remove from one side against annotations on the removed subtree
    // that only the other side has.
    for (i, r) in union.iter().enumerate() {
        if r.kind() != AnnotationKind::Remove || !r.is_active() {
            continue;
        }
        let (remover, other, remover_is_a) = match (on(a, r), on(b, r)) {
            (true, false) => (a, b, true),
            (false, true) => (b, a, false),
            _ => continue,
        };
        for (j, x) in union.iter().enumerate() {
            if i == j || !x.target.starts_with(&r.target) || !x.is_active() || !on(other, x) || on(remover, x) {
                continue;
            }
            let (left, right) = if remover_is_a { (r, x) } else { (x, r) };
            conflicts.push(MergeConflict { kind: MergeConflictKind::RemoveExclusion, left: left.clone(), right: right.clone() });
            excluded[i] = true;
            excluded[j] = true;
        }
    }
    let merged: Vec<Annotation> = union.into_iter().zip(excluded).filter(|(_, ex)| !ex).map(|(x, _)| x).collect();
    let mut completed = a.completed.clone();
    completed.extend(b.completed.iter().cloned());
    Ok(MergeOutcome {
        merged: AnnotationSet {
            library: a.library.clone(),
            annotations: merged,
            completed,
        },
        conflicts,
    })
}
