//! Suggested annotations from usage data and docstrings.

mod binomial;
mod optionality;
pub(crate) mod preconditions;
mod suggest;
mod usefulness;

use serde::{Deserialize, Serialize};

pub use binomial::binomial_p_value;
pub use optionality::{suggest_optionality, OptionalityDecision, Verdict, RULE_OPTIONAL, RULE_REQUIRED};
pub use suggest::{infer_annotations, Inference};
pub use preconditions::{member_name, mine_preconditions, MinedPreconditions};
pub use usefulness::{
    classify_elements, suggest_deletions, Classification, ElementUsefulness, UsefulnessReport, RULE_CONSTANT, RULE_REMOVE,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    /// Elements with usefulness below this are suggested for deletion.
    pub threshold: u64,
    /// Significance level of the optionality test.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("alpha must be within [0, 1], got {0}")]
pub struct InvalidAlpha(pub f64);

impl InferenceConfig {
    pub fn new(threshold: u64, alpha: f64) -> Result<Self, InvalidAlpha> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(InferenceConfig { threshold, alpha })
        } else {
            Err(InvalidAlpha(alpha))
        }
    }
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig { threshold: 1, alpha: 0.05 }
    }
}
