use serde::Serialize;

use super::filter::{Filter, FilterContext, InvalidFilter};
use super::validate::{validate, validate_annotation, Violation};
use super::{Annotation, AnnotationSet, Origin, Payload};
use crate::inference::UsefulnessReport;
use crate::model::{ApiModel, ModelIndex};
use crate::qname::QualifiedName;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Skipped {
    pub target: QualifiedName,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchOutcome {
    pub set: AnnotationSet,
    pub applied: Vec<QualifiedName>,
    pub skipped: Vec<Skipped>,
}

fn key(v: &Violation) -> (String, QualifiedName, Option<super::AnnotationKind>) {
    (format!("{:?}", v.code), v.target.clone(), v.kind)
}

/// Adds `payload` to every element matching `filter`. Elements where the
/// annotation would break an invariant are skipped and reported; the
/// returned set validates whenever the input did.
pub fn batch_annotate(
    set: &AnnotationSet,
    model: &ApiModel,
    report: Option<&UsefulnessReport>,
    filter: &str,
    payload: &Payload,
    origin: &Origin,
) -> Result<BatchOutcome, InvalidFilter> {
    let filter = Filter::parse(filter)?;
    let index = ModelIndex::new(model);
    let matched = {
        let ctx = FilterContext::new(&index, set, report);
        filter.select(&ctx)?
    };
    let kind = payload.kind();
    let mut skipped = Vec::new();
    let mut candidates: Vec<Annotation> = Vec::new();
    for target in matched {
        let el_kind = index.get(&target).map(|e| e.kind());
        let reason = if !el_kind.is_some_and(|k| kind.targets().contains(&k)) {
            Some(format!("{kind} cannot target a {}", el_kind.map_or("missing element", |k| k.as_str())))
        } else if set.completed.contains(&target) {
            Some("element is marked complete".to_string())
        } else if let Some(existing) = set.find(&target, kind) {
            Some(if &existing.payload == payload {
                "identical annotation already present".to_string()
            } else {
                format!("already has a different {kind} annotation")
            })
        } else {
            let a = Annotation { target: target.clone(), payload: payload.clone(), origin: origin.clone(), review: Default::default() };
            match validate_annotation(&a, &index).first() {
                Some(v) => Some(v.message.clone()),
                None => {
                    candidates.push(a);
                    None
                }
            }
        };
        if let Some(reason) = reason {
            skipped.push(Skipped { target, reason });
        }
    }

    // Set-level checks (collisions, Remove exclusion) can involve several
    // candidates at once, so offenders are dropped until the set settles.
    let baseline: Vec<_> = validate(set, model).iter().map(key).collect();
    loop {
        let mut trial = set.clone();
        trial.annotations.extend(candidates.iter().cloned());
        let fresh: Vec<Violation> = validate(&trial, model).into_iter().filter(|v| !baseline.contains(&key(v))).collect();
        if fresh.is_empty() {
            let applied = candidates.iter().map(|a| a.target.clone()).collect();
            return Ok(BatchOutcome { set: trial, applied, skipped });
        }
        let before = candidates.len();
        candidates.retain(|a| {
            let hit = fresh.iter().find(|v| v.target == a.target && v.kind.is_none_or(|k| k == kind));
            if let Some(v) = hit {
                skipped.push(Skipped { target: a.target.clone(), reason: v.message.clone() });
            }
            hit.is_none()
        });
        if candidates.len() == before {
            // Violations that name no candidate directly: give up on the rest.
            for a in candidates.drain(..) {
                skipped.push(Skipped { target: a.target, reason: fresh[0].message.clone() });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::extract_source;
    use crate::inference::{classify_elements, InferenceConfig};
    use crate::usage::analyze_source;

    fn model() -> ApiModel {
        let src = "class Model:\n    def __init__(self, k): ...\n    def fit(self, x): ...\ndef load(path): ...\ndef save(path): ...\ndef dump(path): ...\n";
        ApiModel {
            library_name: "lib".into(),
            version: "1".into(),
            modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), src).0],
        }
    }

    fn origin() -> Origin {
        Origin::Manual { author: "t".into() }
    }

    fn dotted(v: &[QualifiedName]) -> Vec<String> {
        v.iter().map(|q| q.dotted()).collect()
    }

    #[test]
    fn remove_every_unused_function() {
        let m = model();
        let usages = analyze_source("c.py", "from lib.m import load\nload('a')\n", &m);
        let report = classify_elements(&m, &usages, &InferenceConfig::default()).unwrap();
        let mut set = AnnotationSet::new(&m);
        set.completed.insert("lib.m.dump".parse().unwrap());
        let out = batch_annotate(&set, &m, Some(&report), "is:unused kind:function", &Payload::Remove {}, &origin()).unwrap();
        assert_eq!(dotted(&out.applied), vec!["lib.m.Model.fit", "lib.m.save"]);
        let skipped: Vec<String> = out.skipped.iter().map(|s| s.target.dotted()).collect();
        assert_eq!(skipped, vec!["lib.m.Model.__init__", "lib.m.dump"]);
        assert!(validate(&out.set, &m).is_empty());
    }

    #[test]
    fn no_match_leaves_the_set_unchanged() {
        let m = model();
        let set = AnnotationSet::new(&m);
        let out = batch_annotate(&set, &m, None, "nothing_matches_this", &Payload::Remove {}, &origin()).unwrap();
        assert_eq!(out.set, set);
        assert!(out.applied.is_empty() && out.skipped.is_empty());
    }

    #[test]
    fn kind_mismatches_and_collisions_are_skipped() {
        let m = model();
        let set = AnnotationSet::new(&m);
        let rename = Payload::Rename { new_name: "store".into() };
        let out = batch_annotate(&set, &m, None, "a", &rename, &origin()).unwrap();
        // load, save and dump would all become `store`; the class and the
        // parameters named `path` would collide with their siblings only.
        assert!(validate(&out.set, &m).is_empty());
        let renamed_functions = out.applied.iter().filter(|q| q.len() == 3 && q.name() != "Model").count();
        assert!(renamed_functions <= 1);
        assert!(!out.skipped.is_empty());
    }

    #[test]
    fn invalid_filters_and_missing_reports_fail() {
        let m = model();
        let set = AnnotationSet::new(&m);
        assert!(batch_annotate(&set, &m, None, "is:bogus", &Payload::Remove {}, &origin()).is_err());
        assert!(batch_annotate(&set, &m, None, "is:unused", &Payload::Remove {}, &origin()).is_err());
    }

    #[test]
    fn identical_annotations_are_not_duplicated() {
        let m = model();
        let set = AnnotationSet::new(&m);
        let once = batch_annotate(&set, &m, None, "kind:function save", &Payload::Remove {}, &origin()).unwrap();
        let twice = batch_annotate(&once.set, &m, None, "kind:function save", &Payload::Remove {}, &origin()).unwrap();
        assert_eq!(twice.set, once.set);
        assert_eq!(twice.skipped[0].reason, "identical annotation already present");
    }
}
