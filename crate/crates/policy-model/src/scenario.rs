//! Randomized scenario generation over a small closed vocabulary, shared by
//! the engine equivalence tests and the acceptance suite. Small vocabularies
//! force frequent collisions, which is where decision bugs hide.

use rand::Rng;

use crate::attrs::AttributeSet;
use crate::condition::ConditionExpr;
use crate::constraint::{ConstraintSpec, CwBranch, CwSpec, HbdsodSpec, SodGroup};
use crate::numeric::{CmpOp, NumericComparison};
use crate::oracle::{ClearRequest, PermissionAssignmentClear, RoleAssignmentClear};
use crate::sat::{PolicyStatement, SatTuple};

pub const SUBJECTS: [&str; 4] = ["s0", "s1", "s2", "s3"];
pub const ACTIONS: [&str; 3] = ["a0", "a1", "a2"];
pub const TARGETS: [&str; 3] = ["t0", "t1", "t2"];
pub const ROLES: [&str; 8] = ["r0", "r1", "r2", "r3", "r4", "r5", "r6", "r7"];
pub const USERS: [&str; 3] = ["u0", "u1", "u2"];
pub const STRING_ATTRS: [&str; 3] = ["n0", "n1", "n2"];
pub const STRING_VALUES: [&str; 3] = ["v0", "v1", "v2"];
/// Numeric attribute names with their fixed bit widths; widths must be stable
/// per name or bit patterns can never match.
pub const NUMERIC_ATTRS: [(&str, u32); 2] = [("m0", 5), ("m1", 3)];
pub const OBJECT_TYPES: [&str; 3] = ["o0", "o1", "o2"];
pub const INSTANCES: [&str; 4] = ["i0", "i1", "i2", "i3"];
pub const DOMAINS: [&str; 4] = ["d0", "d1", "d2", "d3"];

pub fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

fn random_predicate<R: Rng>(rng: &mut R) -> ConditionExpr {
    if rng.gen_bool(0.5) {
        ConditionExpr::StrEq {
            name: pick(rng, &STRING_ATTRS).to_string(),
            value: pick(rng, &STRING_VALUES).to_string(),
        }
    } else {
        let (name, bits) = NUMERIC_ATTRS[rng.gen_range(0..NUMERIC_ATTRS.len())];
        let op = [CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge, CmpOp::Eq][rng.gen_range(0..5)];
        let value = rng.gen_range(0..(1u64 << bits));
        ConditionExpr::Num(NumericComparison::new(name, op, value, bits))
    }
}

pub fn random_condition<R: Rng>(rng: &mut R, depth: u32) -> ConditionExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        return random_predicate(rng);
    }
    let n = rng.gen_range(1..=3);
    let children: Vec<_> = (0..n).map(|_| random_condition(rng, depth - 1)).collect();
    match rng.gen_range(0..3) {
        0 => ConditionExpr::And(children),
        1 => ConditionExpr::Or(children),
        _ => ConditionExpr::Kofn(rng.gen_range(1..=children.len()), children),
    }
}

pub fn random_attrs<R: Rng>(rng: &mut R) -> AttributeSet {
    let mut attrs = AttributeSet::new();
    for name in STRING_ATTRS {
        if rng.gen_bool(0.6) {
            attrs.add_string(name, pick(rng, &STRING_VALUES)).unwrap();
        }
    }
    for (name, bits) in NUMERIC_ATTRS {
        if rng.gen_bool(0.6) {
            attrs.add_numeric(name, rng.gen_range(0..(1u64 << bits)), bits).unwrap();
        }
    }
    attrs
}

pub fn random_tuple<R: Rng>(rng: &mut R) -> SatTuple {
    SatTuple::new(pick(rng, &SUBJECTS), pick(rng, &ACTIONS), pick(rng, &TARGETS))
}

pub struct EspoonScript {
    pub policies: Vec<PolicyStatement>,
    pub requests: Vec<(SatTuple, AttributeSet)>,
}

pub fn espoon_script<R: Rng>(rng: &mut R, max_policies: usize, requests: usize) -> EspoonScript {
    let policies = (0..rng.gen_range(1..=max_policies))
        .map(|_| PolicyStatement {
            condition: rng.gen_bool(0.8).then(|| random_condition(rng, 2)),
            tuple: random_tuple(rng),
        })
        .collect();
    let requests = (0..requests).map(|_| (random_tuple(rng), random_attrs(rng))).collect();
    EspoonScript { policies, requests }
}

pub struct RbacWorld {
    pub role_assignments: Vec<(String, RoleAssignmentClear)>,
    pub permission_assignments: Vec<PermissionAssignmentClear>,
    /// Edges only from lower to higher role index, so the graph is acyclic.
    pub hierarchy_edges: Vec<(String, String)>,
}

pub enum RbacStep {
    Activate { user: String, role: String, attrs: AttributeSet },
    Access { user: String, role: String, action: String, target: String, attrs: AttributeSet },
}

pub fn rbac_script<R: Rng>(rng: &mut R, steps: usize) -> (RbacWorld, Vec<RbacStep>) {
    let role_assignments = USERS
        .iter()
        .map(|u| {
            let mut roles: Vec<String> = ROLES
                .iter()
                .filter(|_| rng.gen_bool(0.4))
                .map(|r| r.to_string())
                .collect();
            if roles.is_empty() {
                roles.push(pick(rng, &ROLES).to_string());
            }
            (
                u.to_string(),
                RoleAssignmentClear {
                    roles,
                    activation: rng.gen_bool(0.3).then(|| random_condition(rng, 1)),
                },
            )
        })
        .collect();
    let permission_assignments = (0..rng.gen_range(1..=10))
        .map(|_| PermissionAssignmentClear {
            role: pick(rng, &ROLES).to_string(),
            permissions: (0..rng.gen_range(1..=4))
                .map(|_| (pick(rng, &ACTIONS).to_string(), pick(rng, &TARGETS).to_string()))
                .collect(),
            grant: rng.gen_bool(0.3).then(|| random_condition(rng, 1)),
        })
        .collect();
    let mut hierarchy_edges = Vec::new();
    for i in 0..ROLES.len() {
        for j in (i + 1)..ROLES.len() {
            if rng.gen_bool(0.15) {
                hierarchy_edges.push((ROLES[i].to_string(), ROLES[j].to_string()));
            }
        }
    }
    let steps = (0..steps)
        .map(|_| {
            let user = pick(rng, &USERS).to_string();
            if rng.gen_bool(0.4) {
                RbacStep::Activate {
                    user,
                    role: pick(rng, &ROLES).to_string(),
                    attrs: random_attrs(rng),
                }
            } else {
                RbacStep::Access {
                    user,
                    role: pick(rng, &ROLES).to_string(),
                    action: pick(rng, &ACTIONS).to_string(),
                    target: pick(rng, &TARGETS).to_string(),
                    attrs: random_attrs(rng),
                }
            }
        })
        .collect();
    (RbacWorld { role_assignments, permission_assignments, hierarchy_edges }, steps)
}

/// Context element strings drawn from a tiny pool so constraints and requests
/// actually intersect.
fn random_context<R: Rng>(rng: &mut R) -> Vec<String> {
    // Distinct names so the pool can be replayed through an AttributeSet.
    let pool = ["loc=office", "shift=day", "team=blue"];
    pool.iter().filter(|_| rng.gen_bool(0.5)).map(|s| s.to_string()).collect()
}

pub fn random_constraint<R: Rng>(rng: &mut R) -> ConstraintSpec {
    if rng.gen_bool(0.5) {
        let y = rng.gen_range(2..=3.min(ACTIONS.len()));
        let mut members: Vec<String> = ACTIONS.iter().map(|a| a.to_string()).collect();
        while members.len() > y {
            members.remove(rng.gen_range(0..members.len()));
        }
        ConstraintSpec::Hbdsod(HbdsodSpec {
            group: if rng.gen_bool(0.8) { SodGroup::Actions } else { SodGroup::Roles },
            members: if rng.gen_bool(0.2) {
                ROLES[..y].iter().map(|r| r.to_string()).collect()
            } else {
                members
            },
            object_type: pick(rng, &OBJECT_TYPES).to_string(),
            context: if rng.gen_bool(0.3) { random_context(rng) } else { Vec::new() },
            bind_instance: rng.gen_bool(0.8),
        })
    } else {
        let z = rng.gen_range(0..=3);
        let branches = (0..rng.gen_range(2..=3))
            .map(|_| CwBranch {
                object_type: pick(rng, &OBJECT_TYPES).to_string(),
                domains: (0..z).map(|_| pick(rng, &DOMAINS).to_string()).collect(),
            })
            .collect();
        ConstraintSpec::Cw(CwSpec { branches })
    }
}

pub fn random_clear_request<R: Rng>(rng: &mut R) -> ClearRequest {
    let z = rng.gen_range(0..=3);
    ClearRequest {
        role: pick(rng, &ROLES[..3]).to_string(),
        action: pick(rng, &ACTIONS).to_string(),
        object_type: pick(rng, &OBJECT_TYPES).to_string(),
        instance: pick(rng, &INSTANCES).to_string(),
        domains: (0..z).map(|_| pick(rng, &DOMAINS).to_string()).collect(),
        context: random_context(rng),
    }
}

pub struct EgrantScript {
    pub constraints: Vec<ConstraintSpec>,
    pub steps: Vec<(String, ClearRequest)>,
}

pub fn egrant_script<R: Rng>(rng: &mut R, max_constraints: usize, steps: usize) -> EgrantScript {
    let constraints = (0..rng.gen_range(1..=max_constraints))
        .map(|_| {
            let c = random_constraint(rng);
            debug_assert!(c.validate().is_ok());
            c
        })
        .collect();
    let steps = (0..steps)
        .map(|_| (pick(rng, &USERS).to_string(), random_clear_request(rng)))
        .collect();
    EgrantScript { constraints, steps }
}
