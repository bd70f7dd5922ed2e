//! Cleartext reference engine. Every encrypted phase is tested for decision
//! equivalence against this module, so it deliberately mirrors the matching
//! semantics of the encrypted side (membership of element strings, label-wise
//! history probes) rather than re-deriving arithmetic truth.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::attrs::AttributeSet;
use crate::condition::ConditionExpr;
use crate::constraint::{ConstraintSpec, CwBranch, SodGroup};
use crate::error::PolicyError;
use crate::numeric::Compiled;
use crate::sat::PolicyStatement;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleAssignmentClear {
    pub roles: Vec<String>,
    pub activation: Option<ConditionExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermissionAssignmentClear {
    pub role: String,
    pub permissions: Vec<(String, String)>,
    pub grant: Option<ConditionExpr>,
}

/// One granted 4-tuple request as remembered by the access history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryRecordClear {
    pub role: String,
    pub action: String,
    pub object_type: String,
    pub instance: String,
    pub domains: Vec<String>,
    pub context: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClearRequest {
    pub role: String,
    pub action: String,
    pub object_type: String,
    pub instance: String,
    pub domains: Vec<String>,
    pub context: Vec<String>,
}

impl ClearRequest {
    pub fn to_record(&self) -> HistoryRecordClear {
        HistoryRecordClear {
            role: self.role.clone(),
            action: self.action.clone(),
            object_type: self.object_type.clone(),
            instance: self.instance.clone(),
            domains: self.domains.clone(),
            context: self.context.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleartextWorld {
    pub policies: Vec<PolicyStatement>,
    pub role_assignments: BTreeMap<String, RoleAssignmentClear>,
    pub permission_assignments: Vec<PermissionAssignmentClear>,
    /// derived role -> base role
    pub hierarchy_edges: Vec<(String, String)>,
    pub active_roles: BTreeMap<String, Vec<String>>,
    pub constraints: Vec<ConstraintSpec>,
    pub history: BTreeMap<String, Vec<HistoryRecordClear>>,
    /// When set, repeating the exact same group member on the same object is
    /// also a separation-of-duty violation.
    pub deny_exact_repeat: bool,
}

fn condition_ok(cond: &Option<ConditionExpr>, attrs: &AttributeSet) -> Result<bool, PolicyError> {
    match cond {
        None => Ok(true),
        Some(c) => Ok(match c.compile()? {
            Compiled::Always(b) => b,
            Compiled::Tree(t) => t.evaluate(&mut |leaf: &String| attrs.matches_leaf(leaf), false),
        }),
    }
}

impl CleartextWorld {
    pub fn new() -> Self {
        Self::default()
    }

    /// ESPOON decision: permit iff ANY policy with the exact ⟨S,A,T⟩ tuple
    /// has a satisfied (or absent) condition. Deny by default.
    pub fn espoon_decide(
        &self,
        subject: &str,
        action: &str,
        target: &str,
        attrs: &AttributeSet,
    ) -> Result<bool, PolicyError> {
        for p in &self.policies {
            if p.tuple.subject == subject
                && p.tuple.action == action
                && p.tuple.target == target
                && condition_ok(&p.condition, attrs)?
            {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Role activation: assigned + activation condition satisfied. Appends to
    /// the active-role session on success.
    pub fn activate_role(
        &mut self,
        user: &str,
        role: &str,
        attrs: &AttributeSet,
    ) -> Result<bool, PolicyError> {
        let Some(assign) = self.role_assignments.get(user) else { return Ok(false) };
        if !assign.roles.iter().any(|r| r == role) {
            return Ok(false);
        }
        if !condition_ok(&assign.activation, attrs)? {
            return Ok(false);
        }
        self.active_roles.entry(user.to_string()).or_default().push(role.to_string());
        Ok(true)
    }

    pub fn deactivate_role(&mut self, user: &str, role: &str) -> bool {
        match self.active_roles.get_mut(user) {
            Some(roles) => {
                let before = roles.len();
                roles.retain(|r| r != role);
                roles.len() != before
            }
            None => false,
        }
    }

    /// Base roles reachable from `role`, breadth-first, excluding `role`.
    pub fn base_roles(&self, role: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([role.to_string()]);
        let mut seen = std::collections::BTreeSet::from([role.to_string()]);
        while let Some(cur) = queue.pop_front() {
            for (derived, base) in &self.hierarchy_edges {
                if *derived == cur && seen.insert(base.clone()) {
                    out.push(base.clone());
                    queue.push_back(base.clone());
                }
            }
        }
        out
    }

    /// RBAC access: session gate, then the role's own permission lists, then
    /// inherited lists walking base-role edges breadth-first.
    pub fn access_request(
        &self,
        user: &str,
        role: &str,
        action: &str,
        target: &str,
        attrs: &AttributeSet,
    ) -> Result<bool, PolicyError> {
        let active = self
            .active_roles
            .get(user)
            .map(|rs| rs.iter().any(|r| r == role))
            .unwrap_or(false);
        if !active {
            return Ok(false);
        }
        let mut probe = vec![role.to_string()];
        probe.extend(self.base_roles(role));
        for r in &probe {
            for pa in self.permission_assignments.iter().filter(|pa| &pa.role == r) {
                if pa.permissions.iter().any(|(a, t)| a == action && t == target)
                    && condition_ok(&pa.grant, attrs)?
                {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn hbdsod_satisfied(&self, h: &crate::constraint::HbdsodSpec, req: &ClearRequest) -> bool {
        let member = match h.group {
            SodGroup::Actions => &req.action,
            SodGroup::Roles => &req.role,
        };
        h.members.iter().any(|m| m == member)
            && h.object_type == req.object_type
            && h.context.iter().all(|c| req.context.contains(c))
    }

    fn hbdsod_violates(
        &self,
        h: &crate::constraint::HbdsodSpec,
        req: &ClearRequest,
        rec: &HistoryRecordClear,
    ) -> bool {
        let (req_member, rec_member) = match h.group {
            SodGroup::Actions => (&req.action, &rec.action),
            SodGroup::Roles => (&req.role, &rec.role),
        };
        let in_probe = h
            .members
            .iter()
            .any(|m| m == rec_member && (self.deny_exact_repeat || m != req_member));
        in_probe
            && rec.object_type == req.object_type
            && (!h.bind_instance || rec.instance == req.instance)
            && h.context.iter().all(|c| rec.context.contains(c))
    }

    fn cw_branch_matches(b: &CwBranch, object_type: &str, domains: &[String]) -> bool {
        b.object_type == object_type
            && b.domains.iter().enumerate().all(|(i, d)| domains.get(i) == Some(d))
    }

    /// Dynamic-constraint decision with history update on grant. Denies iff
    /// some constraint satisfied by the request finds a conflicting record in
    /// this requester's history.
    pub fn egrant_decide(&mut self, user: &str, req: &ClearRequest) -> bool {
        let history = self.history.get(user).cloned().unwrap_or_default();
        for spec in &self.constraints {
            match spec {
                ConstraintSpec::Hbdsod(h) => {
                    if self.hbdsod_satisfied(h, req)
                        && history.iter().any(|rec| self.hbdsod_violates(h, req, rec))
                    {
                        return false;
                    }
                }
                ConstraintSpec::Cw(c) => {
                    let matched: Vec<bool> = c
                        .branches
                        .iter()
                        .map(|b| Self::cw_branch_matches(b, &req.object_type, &req.domains))
                        .collect();
                    if matched.iter().any(|&m| m) {
                        let conflict = c.branches.iter().zip(&matched).any(|(b, &m)| {
                            !m && history
                                .iter()
                                .any(|rec| Self::cw_branch_matches(b, &rec.object_type, &rec.domains))
                        });
                        if conflict {
                            return false;
                        }
                    }
                }
            }
        }
        self.history.entry(user.to_string()).or_default().push(req.to_record());
        true
    }
}

/// Unified oracle entry point covering every engine phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleRequest {
    Espoon { subject: String, action: String, target: String, attrs: AttributeSet },
    Activate { user: String, role: String, attrs: AttributeSet },
    Access { user: String, role: String, action: String, target: String, attrs: AttributeSet },
    Egrant { user: String, request: ClearRequest },
}

pub fn cleartext_decide(
    world: &mut CleartextWorld,
    req: &OracleRequest,
) -> Result<bool, PolicyError> {
    match req {
        OracleRequest::Espoon { subject, action, target, attrs } => {
            world.espoon_decide(subject, action, target, attrs)
        }
        OracleRequest::Activate { user, role, attrs } => world.activate_role(user, role, attrs),
        OracleRequest::Access { user, role, action, target, attrs } => {
            world.access_request(user, role, action, target, attrs)
        }
        OracleRequest::Egrant { user, request } => Ok(world.egrant_decide(user, request)),
    }
}
