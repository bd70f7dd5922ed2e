//! Cleartext descriptions of dynamic constraints. The encrypted engine
//! consumes these at deployment; the oracle consumes them directly.

use serde::{Deserialize, Serialize};

use crate::error::PolicyError;

/// Which request element a history-based separation-of-duty group ranges
/// over. Action groups give classic HBDSoD; role groups give the
/// role-activation DSoD variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SodGroup {
    Actions,
    Roles,
}

/// 1-of-n separation of duty bound to an object type, optionally to the
/// concrete instance, and optionally to context elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HbdsodSpec {
    pub group: SodGroup,
    pub members: Vec<String>,
    pub object_type: String,
    /// Attribute element strings ("location=office", "t:**0", ...) that must
    /// hold both for the request and for a history record to conflict.
    pub context: Vec<String>,
    pub bind_instance: bool,
}

impl HbdsodSpec {
    pub fn actions(members: &[&str], object_type: &str) -> Self {
        HbdsodSpec {
            group: SodGroup::Actions,
            members: members.iter().map(|s| s.to_string()).collect(),
            object_type: object_type.to_string(),
            context: Vec::new(),
            bind_instance: true,
        }
    }
}

/// One conflict-of-interest branch: an object type plus a domain path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwBranch {
    pub object_type: String,
    pub domains: Vec<String>,
}

/// Chinese Wall: ≥ 2 branches in mutual conflict, all with the same depth Z.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwSpec {
    pub branches: Vec<CwBranch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConstraintSpec {
    Hbdsod(HbdsodSpec),
    Cw(CwSpec),
}

impl ConstraintSpec {
    pub fn validate(&self) -> Result<(), PolicyError> {
        match self {
            ConstraintSpec::Hbdsod(h) => {
                if h.members.len() < 2 {
                    return Err(PolicyError::parse(0, "separation group needs at least 2 members"));
                }
                if h.object_type.is_empty() {
                    return Err(PolicyError::parse(0, "empty object type"));
                }
                if h.members.iter().any(|m| m.is_empty()) || h.context.iter().any(|c| c.is_empty())
                {
                    return Err(PolicyError::parse(0, "empty constraint element"));
                }
            }
            ConstraintSpec::Cw(c) => {
                if c.branches.len() < 2 {
                    return Err(PolicyError::parse(0, "conflict class needs at least 2 branches"));
                }
                let depth = c.branches[0].domains.len();
                for b in &c.branches {
                    if b.object_type.is_empty() || b.domains.iter().any(|d| d.is_empty()) {
                        return Err(PolicyError::parse(0, "empty constraint element"));
                    }
                    if b.domains.len() != depth {
                        return Err(PolicyError::parse(0, "branches must share one domain depth"));
                    }
                }
            }
        }
        Ok(())
    }
}
