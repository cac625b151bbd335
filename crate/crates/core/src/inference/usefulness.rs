use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::InferenceConfig;
use crate::annotation::{Annotation, Payload};
use crate::model::{ApiModel, ElementKind, ElementRef};
use crate::qname::QualifiedName;
use crate::usage::{LibraryRef, ModelMismatch, UsageStore, ValueKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Unused,
    Useless,
    RarelyUsed,
    AlmostUseless,
    Useful,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Unused => "unused",
            Classification::Useless => "useless",
            Classification::RarelyUsed => "rarely_used",
            Classification::AlmostUseless => "almost_useless",
            Classification::Useful => "useful",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Classification::Unused,
            Classification::Useless,
            Classification::RarelyUsed,
            Classification::AlmostUseless,
            Classification::Useful,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementUsefulness {
    pub qname: QualifiedName,
    pub kind: ElementKind,
    pub public: bool,
    pub usage_count: u64,
    /// Parameters only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub most_common_value: Option<ValueKey>,
    pub usefulness: u64,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsefulnessReport {
    pub library: LibraryRef,
    pub threshold: u64,
    /// Declaration order.
    pub elements: Vec<ElementUsefulness>,
    #[serde(skip)]
    index: BTreeMap<QualifiedName, usize>,
}

impl UsefulnessReport {
    fn new(library: LibraryRef, threshold: u64, elements: Vec<ElementUsefulness>) -> Self {
        let index = elements.iter().enumerate().map(|(i, e)| (e.qname.clone(), i)).collect();
        UsefulnessReport { library, threshold, elements, index }
    }

    pub fn get(&self, qname: &QualifiedName) -> Option<&ElementUsefulness> {
        self.index.get(qname).map(|&i| &self.elements[i])
    }

    pub fn classification(&self, qname: &QualifiedName) -> Option<Classification> {
        self.get(qname).map(|e| e.classification)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, crate::model::SchemaError> {
        let r: UsefulnessReport = serde_json::from_slice(bytes)?;
        Ok(UsefulnessReport::new(r.library, r.threshold, r.elements))
    }
}

fn classify(kind: ElementKind, usage: u64, usefulness: u64, t: u64) -> Classification {
    if t == 0 {
        Classification::Useful
    } else if usage == 0 {
        Classification::Unused
    } else if kind == ElementKind::Parameter && usefulness == 0 {
        Classification::Useless
    } else if usage < t {
        Classification::RarelyUsed
    } else if usefulness < t {
        Classification::AlmostUseless
    } else {
        Classification::Useful
    }
}

/// Usage counts and usefulness of every class, function and parameter.
pub fn classify_elements(model: &ApiModel, usages: &UsageStore, config: &InferenceConfig) -> Result<UsefulnessReport, ModelMismatch> {
    usages.check_model(model)?;
    let t = config.threshold;
    let elements = model
        .elements()
        .into_iter()
        .map(|(qname, el)| {
            let public = el.is_public();
            let (usage_count, most_common_value, usefulness) = match el {
                ElementRef::Class(_) => {
                    let n = usages.class_usage(&qname);
                    (n, None, n)
                }
                ElementRef::Function(..) => {
                    let n = usages.function_usage(&qname);
                    (n, None, n)
                }
                ElementRef::Parameter(p, ..) => {
                    let n = usages.parameter_usage(&qname);
                    match usages.values(&qname) {
                        Some(vc) if vc.total() > 0 => {
                            let (mcv, top) = vc.ranked(p.default_literal()).swap_remove(0);
                            (n, Some(mcv), vc.total() - top)
                        }
                        _ => (n, None, 0),
                    }
                }
                ElementRef::Module(_) => unreachable!("elements() yields no modules"),
            };
            let kind = el.kind();
            ElementUsefulness {
                classification: classify(kind, usage_count, usefulness, t),
                qname,
                kind,
                public,
                usage_count,
                most_common_value,
                usefulness,
            }
        })
        .collect();
    Ok(UsefulnessReport::new(usages.library.clone(), t, elements))
}

pub const RULE_REMOVE: &str = "usage.rarely_used";
pub const RULE_CONSTANT: &str = "usage.almost_useless";

/// Remove for rarely used public classes and functions, and constants for
/// public parameters whose most common value is a literal and whose
/// usefulness is below the threshold. Constructors and variadic parameters
/// are left alone.
pub fn suggest_deletions(report: &UsefulnessReport, model: &ApiModel) -> Vec<Annotation> {
    let t = report.threshold;
    if t == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for e in report.elements.iter().filter(|e| e.public) {
        match e.kind {
            ElementKind::Class | ElementKind::Function if e.usage_count < t => {
                if matches!(model.element(&e.qname), Some(ElementRef::Function(f, _)) if f.is_init()) {
                    continue;
                }
                out.push(Annotation::inferred(
                    e.qname.clone(),
                    Payload::Remove {},
                    RULE_REMOVE,
                    format!("usage count {} < {t}", e.usage_count),
                ));
            }
            ElementKind::Parameter if e.usefulness < t => {
                let Some(ValueKey::Literal(v)) = &e.most_common_value else { continue };
                if matches!(model.element(&e.qname), Some(ElementRef::Parameter(p, ..)) if p.kind.is_variadic()) {
                    continue;
                }
                out.push(Annotation::inferred(
                    e.qname.clone(),
                    Payload::ReplaceWithConstant { value: v.clone() },
                    RULE_CONSTANT,
                    format!("usefulness {} < {t}, most common value {v}", e.usefulness),
                ));
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::AnnotationKind;
    use crate::extract::extract_source;
    use crate::literal::LiteralValue;
    use crate::usage::analyze_source;
    use proptest::prelude::*;

    fn q(s: &str) -> QualifiedName {
        s.parse().unwrap()
    }

    fn model(src: &str) -> ApiModel {
        ApiModel { library_name: "lib".into(), version: "1".into(), modules: vec![extract_source("m.py", &q("lib.m"), src).0] }
    }

    fn cfg(t: u64) -> InferenceConfig {
        InferenceConfig { threshold: t, alpha: 0.05 }
    }

    const LIB: &str = "class C:\n    def __init__(self, x): ...\n    def run(self): ...\nclass D: ...\ndef f(a, flag=True): ...\ndef g(): ...\ndef _h(): ...\n";

    fn store(m: &ApiModel, client: &str) -> UsageStore {
        analyze_source("c.py", client, m)
    }

    #[test]
    fn always_the_same_value_is_useless() {
        let m = model(LIB);
        let s = store(&m, "from lib.m import f\nfor _ in r:\n    f(1, flag=True)\nf(1, flag=True)\nf(1, flag=True)\nf(2, flag=True)\nf(3, flag=True)\n");
        let r = classify_elements(&m, &s, &cfg(1)).unwrap();
        let flag = r.get(&q("lib.m.f.flag")).unwrap();
        assert_eq!(flag.usage_count, 5);
        assert_eq!(flag.usefulness, 0);
        assert_eq!(flag.classification, Classification::Useless);
        assert_eq!(flag.most_common_value, Some(ValueKey::Literal(LiteralValue::bool(true))));
        assert_eq!(r.classification(&q("lib.m.g")), Some(Classification::Unused));
        assert_eq!(r.classification(&q("lib.m.f")), Some(Classification::Useful));
        let a = r.get(&q("lib.m.f.a")).unwrap();
        assert_eq!((a.usage_count, a.usefulness), (5, 2));
    }

    #[test]
    fn thresholds_on_seven_three_split() {
        let m = model(LIB);
        let client = format!("from lib.m import f\n{}{}", "f(1)\n".repeat(7), "f(2)\n".repeat(3));
        let s = store(&m, &client);
        let a = q("lib.m.f.a");
        let r4 = classify_elements(&m, &s, &cfg(4)).unwrap();
        assert_eq!(r4.get(&a).unwrap().usefulness, 3);
        assert_eq!(r4.classification(&a), Some(Classification::AlmostUseless));
        assert_eq!(classify_elements(&m, &s, &cfg(3)).unwrap().classification(&a), Some(Classification::Useful));
        assert_eq!(classify_elements(&m, &s, &cfg(11)).unwrap().classification(&a), Some(Classification::RarelyUsed));
    }

    #[test]
    fn threshold_zero_keeps_everything() {
        let m = model(LIB);
        let r = classify_elements(&m, &store(&m, ""), &cfg(0)).unwrap();
        assert!(r.elements.iter().all(|e| e.classification == Classification::Useful));
        assert!(suggest_deletions(&r, &m).is_empty());
    }

    #[test]
    fn deletions() {
        let m = model(LIB);
        let s = store(&m, "from lib.m import f, C\nf(x, flag=False)\nf(1)\nc = C(1)\n");
        let r = classify_elements(&m, &s, &cfg(1)).unwrap();
        let got: Vec<(String, AnnotationKind)> = suggest_deletions(&r, &m).iter().map(|a| (a.target.dotted(), a.kind())).collect();
        assert_eq!(
            got,
            vec![
                ("lib.m.C.__init__.x".to_string(), AnnotationKind::ReplaceWithConstant),
                ("lib.m.C.run".to_string(), AnnotationKind::Remove),
                ("lib.m.D".to_string(), AnnotationKind::Remove),
                ("lib.m.g".to_string(), AnnotationKind::Remove),
            ]
        );
    }

    #[test]
    fn non_literal_most_common_value_is_not_a_constant() {
        let m = model(LIB);
        let s = store(&m, "from lib.m import f\nf(x)\n");
        let r = classify_elements(&m, &s, &cfg(5)).unwrap();
        let a = r.get(&q("lib.m.f.a")).unwrap();
        assert!(matches!(a.most_common_value, Some(ValueKey::NonLiteral(_))));
        assert!(!suggest_deletions(&r, &m).iter().any(|x| x.target == q("lib.m.f.a")));
        // flag was only implicitly True, so its constant is suggested
        assert!(suggest_deletions(&r, &m).iter().any(|x| x.target == q("lib.m.f.flag")
            && x.payload == Payload::ReplaceWithConstant { value: LiteralValue::bool(true) }));
    }

    #[test]
    fn report_json_round_trips() {
        let m = model(LIB);
        let r = classify_elements(&m, &store(&m, "from lib.m import f\nf(1)\n"), &cfg(2)).unwrap();
        let back = UsefulnessReport::from_json(r.to_json().as_bytes()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.classification(&q("lib.m.f")), Some(Classification::RarelyUsed));
    }

    fn targets(r: &UsefulnessReport, m: &ApiModel) -> std::collections::BTreeSet<(QualifiedName, AnnotationKind)> {
        suggest_deletions(r, m).into_iter().map(|a| (a.target.clone(), a.kind())).collect()
    }

    proptest! {
        #[test]
        fn suggestions_grow_with_threshold(calls in proptest::collection::vec((0usize..3, 0i32..3), 0..30), t in 0u64..8) {
            let m = model(LIB);
            let mut client = String::from("from lib.m import f, g, C\n");
            for (which, v) in calls {
                client.push_str(match which {
                    0 => "g()\n",
                    1 => "C(1).run()\n",
                    _ => "",
                });
                client.push_str(&format!("f({v}, flag={})\n", if v == 0 { "True" } else { "False" }));
            }
            let s = store(&m, &client);
            let lo = classify_elements(&m, &s, &cfg(t)).unwrap();
            let hi = classify_elements(&m, &s, &cfg(t + 1)).unwrap();
            prop_assert!(targets(&lo, &m).is_subset(&targets(&hi, &m)));
            for e in &lo.elements {
                if e.kind == ElementKind::Parameter {
                    prop_assert!(e.usefulness <= e.usage_count);
                }
            }
        }
    }
}
