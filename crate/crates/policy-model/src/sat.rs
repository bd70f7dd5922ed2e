use serde::{Deserialize, Serialize};

use crate::condition::ConditionExpr;
use crate::error::PolicyError;

/// The ⟨S, A, T⟩ tuple a policy authorizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatTuple {
    pub subject: String,
    pub action: String,
    pub target: String,
}

impl SatTuple {
    pub fn new(subject: impl Into<String>, action: impl Into<String>, target: impl Into<String>) -> Self {
        SatTuple { subject: subject.into(), action: action.into(), target: target.into() }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        for (part, name) in [(&self.subject, "subject"), (&self.action, "action"), (&self.target, "target")] {
            if part.is_empty() {
                return Err(PolicyError::parse(0, format!("empty {name} in policy tuple")));
            }
        }
        Ok(())
    }
}

/// A parsed policy: optional condition guarding an authorization tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyStatement {
    pub condition: Option<ConditionExpr>,
    pub tuple: SatTuple,
}
