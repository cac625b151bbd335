use std::collections::HashSet;

use serde::Serialize;

use super::{classify_elements, mine_preconditions, suggest_deletions, suggest_optionality, InferenceConfig, OptionalityDecision, UsefulnessReport};
use crate::annotation::{validate, Annotation, AnnotationKind, AnnotationSet, Payload};
use crate::literal::LiteralValue;
use crate::model::{ApiModel, ElementRef, ModelIndex};
use crate::qname::QualifiedName;
use crate::usage::{ModelMismatch, UsageStore};

/// Everything one inference run produces.
#[derive(Clone, Debug, Serialize)]
pub struct Inference {
    pub annotations: AnnotationSet,
    pub report: Option<UsefulnessReport>,
    pub decisions: Vec<OptionalityDecision>,
    pub warnings: Vec<String>,
}

/// Runs every rule family and keeps the suggestions that can be applied
/// together. Deletions come first; a parameter replaced by a constant gets
/// nothing else, and nothing is suggested inside a removed element.
/// Without usage data only docstring rules run.
pub fn infer_annotations(model: &ApiModel, usages: Option<&UsageStore>, config: &InferenceConfig) -> Result<Inference, ModelMismatch> {
    let index = ModelIndex::new(model);
    let mut warnings = Vec::new();
    let (report, deletions, decisions) = match usages {
        Some(u) => {
            let report = classify_elements(model, u, config)?;
            let deletions = suggest_deletions(&report, model);
            let decisions = suggest_optionality(model, u, config)?;
            (Some(report), deletions, decisions)
        }
        None => (None, Vec::new(), Vec::new()),
    };
    let mined = mine_preconditions(model);
    warnings.extend(mined.warnings);

    let mut set = AnnotationSet::new(model);
    let mut removed: Vec<QualifiedName> = Vec::new();
    let mut constant: HashSet<QualifiedName> = HashSet::new();
    let candidates = deletions.into_iter().chain(mined.annotations).chain(decisions.iter().filter_map(OptionalityDecision::annotation));
    for a in candidates {
        if removed.iter().any(|r| a.target.starts_with(r)) || constant.contains(&a.target) {
            continue;
        }
        if let Err(why) = compatible(&a, &set, &index) {
            warnings.push(format!("{}: {} not suggested, {why}", a.target, a.kind()));
            continue;
        }
        match a.kind() {
            AnnotationKind::Remove => removed.push(a.target.clone()),
            AnnotationKind::ReplaceWithConstant => {
                constant.insert(a.target.clone());
            }
            _ => {}
        }
        set.annotations.push(a);
    }
    debug_assert!(validate(&set, model).is_empty(), "inferred annotations validate");
    Ok(Inference { annotations: set, report, decisions, warnings })
}

/// Enum replacement and defaults have to agree: the declared or suggested
/// default must be `None` or one of the enum values.
fn compatible(a: &Annotation, set: &AnnotationSet, index: &ModelIndex<'_>) -> Result<(), String> {
    let members_of = |payload: &Payload| match payload {
        Payload::ReplaceWithEnum { members, .. } => Some(members.iter().map(|m| m.value.clone()).collect::<Vec<_>>()),
        _ => None,
    };
    let fits = |v: &LiteralValue, values: &[String]| *v == LiteralValue::none() || v.as_str().is_some_and(|s| values.iter().any(|m| m.as_str() == s));
    match &a.payload {
        Payload::ReplaceWithEnum { .. } => {
            let values = members_of(&a.payload).unwrap_or_default();
            if let Some(ElementRef::Parameter(p, ..)) = index.get(&a.target) {
                match p.default() {
                    Some(d) if d.as_literal().is_none_or(|v| !fits(v, &values)) => {
                        return Err(format!("its default {} is not an enum value", d.source()));
                    }
                    _ => {}
                }
            }
        }
        Payload::MakeOptional { default } => {
            if let Some(values) = set.find(&a.target, AnnotationKind::ReplaceWithEnum).and_then(|e| members_of(&e.payload)) {
                if !fits(default, &values) {
                    return Err(format!("default {default} is not an enum value"));
                }
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::extract_source;
    use crate::usage::analyze_source;

    fn model(src: &str) -> ApiModel {
        ApiModel {
            library_name: "lib".into(),
            version: "1".into(),
            modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), src).0],
        }
    }

    const LIB: &str = "def f(a, flag=False, mode='x'):\n    \"\"\"F.\n\n    Parameters\n    ----------\n    a : int\n        Must be positive.\n    flag : bool\n        Flag.\n    mode : {'x', 'y'}\n        Mode.\n    \"\"\"\ndef g(k, m):\n    \"\"\"G.\n\n    Parameters\n    ----------\n    k : float\n        Must be non-negative.\n    m : int\n        Width.\n    \"\"\"\n";

    #[test]
    fn combines_rule_families() {
        let m = model(LIB);
        let client = "from lib.m import f\n".to_string() + &(1..=3).map(|i| format!("f({i}, flag=True, mode='y')\n")).collect::<String>();
        let usages = analyze_source("c.py", &client, &m);
        let inf = infer_annotations(&m, Some(&usages), &InferenceConfig::default()).unwrap();
        let got: Vec<(String, AnnotationKind)> = inf.annotations.annotations.iter().map(|a| (a.target.dotted(), a.kind())).collect();
        assert!(got.contains(&("lib.m.g".into(), AnnotationKind::Remove)));
        assert!(got.contains(&("lib.m.f.flag".into(), AnnotationKind::ReplaceWithConstant)));
        assert!(got.contains(&("lib.m.f.mode".into(), AnnotationKind::ReplaceWithConstant)));
        assert!(got.contains(&("lib.m.f.a".into(), AnnotationKind::AddBoundsCheck)));
        // nothing inside the removed function, nothing else on a constant
        assert!(!got.iter().any(|(t, _)| t.starts_with("lib.m.g.")));
        assert_eq!(got.iter().filter(|(t, _)| t == "lib.m.f.mode").count(), 1);
        assert!(validate(&inf.annotations, &m).is_empty());
        assert!(inf.report.is_some());
    }

    #[test]
    fn docstrings_only_without_usages() {
        let m = model(LIB);
        let inf = infer_annotations(&m, None, &InferenceConfig::default()).unwrap();
        let kinds: Vec<AnnotationKind> = inf.annotations.annotations.iter().map(Annotation::kind).collect();
        assert_eq!(kinds, [AnnotationKind::AddBoundsCheck, AnnotationKind::ReplaceWithEnum, AnnotationKind::AddBoundsCheck]);
        assert!(inf.report.is_none());
    }

    #[test]
    fn enum_must_cover_the_default() {
        let m = model("def f(mode='z'):\n    \"\"\"F.\n\n    Parameters\n    ----------\n    mode : {'x', 'y'}\n        Mode.\n    \"\"\"\n");
        let inf = infer_annotations(&m, None, &InferenceConfig::default()).unwrap();
        assert!(inf.annotations.annotations.is_empty());
        assert_eq!(inf.warnings.len(), 1);
    }
}
