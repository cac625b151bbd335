use serde::{Deserialize, Serialize};

use super::binomial::binomial_p_value;
use super::InferenceConfig;
use crate::annotation::{Annotation, Payload};
use crate::literal::LiteralValue;
use crate::model::{ApiModel, DefaultValue};
use crate::qname::QualifiedName;
use crate::usage::{ModelMismatch, UsageStore, ValueKey};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    MakeOptional { default: LiteralValue },
    MakeRequired,
    NoChange,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptionalityDecision {
    pub parameter: QualifiedName,
    pub v1: ValueKey,
    pub v2: ValueKey,
    pub uc1: u64,
    pub uc2: u64,
    pub n: u64,
    pub p_value: f64,
    pub verdict: Verdict,
}

pub const RULE_OPTIONAL: &str = "usage.binomial_optional";
pub const RULE_REQUIRED: &str = "usage.binomial_required";

impl OptionalityDecision {
    /// The annotation this decision calls for, if any.
    pub fn annotation(&self) -> Option<Annotation> {
        let evidence = format!(
            "{} x{}, {} x{}, p = {}",
            self.v1, self.uc1, self.v2, self.uc2, self.p_value
        );
        match &self.verdict {
            Verdict::MakeOptional { default } => Some(Annotation::inferred(
                self.parameter.clone(),
                Payload::MakeOptional { default: default.clone() },
                RULE_OPTIONAL,
                evidence,
            )),
            Verdict::MakeRequired => Some(Annotation::inferred(self.parameter.clone(), Payload::MakeRequired {}, RULE_REQUIRED, evidence)),
            Verdict::NoChange => None,
        }
    }
}

/// Binomial test on the two most common values of every public,
/// non-variadic parameter seen with at least two distinct values.
/// Parameters whose declared default is not a literal are not touched.
pub fn suggest_optionality(model: &ApiModel, usages: &UsageStore, config: &InferenceConfig) -> Result<Vec<OptionalityDecision>, ModelMismatch> {
    usages.check_model(model)?;
    let mut out = Vec::new();
    for (f, c) in model.functions() {
        if !f.is_public || c.is_some_and(|c| !c.is_public()) {
            continue;
        }
        for p in &f.parameters {
            if p.kind.is_variadic() || matches!(p.default(), Some(DefaultValue::NonLiteral { .. })) {
                continue;
            }
            let qname = f.param_qname(p);
            let Some(vc) = usages.values(&qname) else { continue };
            let mut ranked = vc.ranked(p.default_literal()).into_iter();
            let (Some((v1, uc1)), Some((v2, uc2))) = (ranked.next(), ranked.next()) else { continue };
            let p_value = binomial_p_value(uc1, uc2);
            let verdict = match (&v1, &v2) {
                (ValueKey::Literal(l1), ValueKey::Literal(_)) => {
                    if p_value <= config.alpha {
                        if p.default_literal() == Some(l1) {
                            Verdict::NoChange
                        } else {
                            Verdict::MakeOptional { default: l1.clone() }
                        }
                    } else if p.is_optional() {
                        Verdict::MakeRequired
                    } else {
                        Verdict::NoChange
                    }
                }
                _ => Verdict::NoChange,
            };
            out.push(OptionalityDecision { parameter: qname, v1, v2, uc1, uc2, n: uc1 + uc2, p_value, verdict });
        }
    }
    Ok(out)
}
