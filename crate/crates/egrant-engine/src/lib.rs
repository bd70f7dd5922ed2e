//! Encrypted dynamic constraints. Constraints are deployed with both a
//! ciphertext and a trapdoor per leaf: the ciphertext side answers "does this
//! request fall under the constraint", the trapdoor side probes the
//! requester's encrypted access history for conflicting records. Evaluation
//! and the history append are one atomic step.

use std::collections::BTreeMap;

use policy_model::{ConstraintSpec, SodGroup, TreeNode};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use sde_core::{
    client_enc, client_td, match_element, server_reenc, server_td, ClientEncryptedElement,
    ClientKeySet, ClientTrapdoor, Element, ElementKind, KeyStore, PublicParams, SdeError,
    ServerEncryptedElement, ServerTrapdoor,
};

#[derive(Debug, Error)]
pub enum EgrantError {
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Policy(#[from] policy_model::PolicyError),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
}

/// Where a request or history element sits in the labeled 4-tuple-plus-
/// context layout. Labels are cleartext so probes compare like with like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementLabel {
    Role,
    Action,
    ObjType,
    Instance,
    Domain(u32),
    Context,
}

impl ElementLabel {
    fn kind(self) -> ElementKind {
        match self {
            ElementLabel::Role => ElementKind::Role,
            ElementLabel::Action => ElementKind::Action,
            ElementLabel::ObjType => ElementKind::ObjectType,
            ElementLabel::Instance => ElementKind::Instance,
            ElementLabel::Domain(level) => ElementKind::Domain(level),
            ElementLabel::Context => ElementKind::Attribute,
        }
    }
}

/// One constraint leaf: ciphertext for satisfiability checks against request
/// trapdoors, trapdoor for probing history ciphertexts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintLeaf {
    pub cipher: ServerEncryptedElement,
    pub trapdoor: ServerTrapdoor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientLeaf {
    pub cipher: ClientEncryptedElement,
    pub trapdoor: ClientTrapdoor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptedHbdsod<L> {
    pub group: SodGroup,
    pub members: Vec<L>,
    pub object_type: L,
    pub context: Vec<L>,
    pub bind_instance: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptedCwBranch<L> {
    pub object_type: L,
    pub domains: Vec<L>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EncryptedConstraint<L> {
    Hbdsod(EncryptedHbdsod<L>),
    Cw(Vec<EncryptedCwBranch<L>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientConstraint {
    pub body: EncryptedConstraint<ClientLeaf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintTree {
    pub constraint_id: u64,
    pub body: EncryptedConstraint<ConstraintLeaf>,
}

impl<L: Clone> EncryptedConstraint<L> {
    /// The gate-tree view used by satisfiability checking: HBDSoD is
    /// AND(1-of-n group, object type, context bindings); Chinese Wall is an
    /// OR over conflict-branch ANDs.
    pub fn tree(&self) -> TreeNode<L> {
        match self {
            EncryptedConstraint::Hbdsod(h) => {
                let mut children = vec![TreeNode::kofn(
                    1,
                    h.members.iter().map(|m| TreeNode::leaf(m.clone())).collect(),
                )];
                children.push(TreeNode::leaf(h.object_type.clone()));
                children.extend(h.context.iter().map(|c| TreeNode::leaf(c.clone())));
                TreeNode::and(children)
            }
            EncryptedConstraint::Cw(branches) => TreeNode::or(
                branches
                    .iter()
                    .map(|b| {
                        let mut leaves = vec![TreeNode::leaf(b.object_type.clone())];
                        leaves.extend(b.domains.iter().map(|d| TreeNode::leaf(d.clone())));
                        if leaves.len() == 1 {
                            leaves.pop().unwrap()
                        } else {
                            TreeNode::and(leaves)
                        }
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintStore {
    pub constraints: Vec<ConstraintTree>,
    next_id: u64,
}

impl ConstraintStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn delete(&mut self, id: u64) -> bool {
        let before = self.constraints.len();
        self.constraints.retain(|c| c.constraint_id != id);
        self.constraints.len() != before
    }
}

/// Client round of deployment: shape-validate, then produce both a ciphertext
/// and a trapdoor per leaf.
pub fn constraint_client<R: Rng>(
    spec: &ConstraintSpec,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<ClientConstraint, EgrantError> {
    spec.validate().map_err(|e| EgrantError::InvalidConstraint(e.to_string()))?;
    let mut leaf = |kind: ElementKind, text: &str| -> Result<ClientLeaf, EgrantError> {
        let e = Element::new(kind, text);
        Ok(ClientLeaf {
            cipher: client_enc(&e, key, params, rng)?,
            trapdoor: client_td(&e, key, params, rng)?,
        })
    };
    let body = match spec {
        ConstraintSpec::Hbdsod(h) => {
            let member_kind = match h.group {
                SodGroup::Actions => ElementKind::Action,
                SodGroup::Roles => ElementKind::Role,
            };
            EncryptedConstraint::Hbdsod(EncryptedHbdsod {
                group: h.group,
                members: h
                    .members
                    .iter()
                    .map(|m| leaf(member_kind, m))
                    .collect::<Result<_, _>>()?,
                object_type: leaf(ElementKind::ObjectType, &h.object_type)?,
                context: h
                    .context
                    .iter()
                    .map(|c| leaf(ElementKind::Attribute, c))
                    .collect::<Result<_, _>>()?,
                bind_instance: h.bind_instance,
            })
        }
        ConstraintSpec::Cw(c) => EncryptedConstraint::Cw(
            c.branches
                .iter()
                .map(|b| {
                    Ok(EncryptedCwBranch {
                        object_type: leaf(ElementKind::ObjectType, &b.object_type)?,
                        domains: b
                            .domains
                            .iter()
                            .enumerate()
                            .map(|(i, d)| leaf(ElementKind::Domain(i as u32 + 1), d))
                            .collect::<Result<_, EgrantError>>()?,
                    })
                })
                .collect::<Result<_, EgrantError>>()?,
        ),
    };
    Ok(ClientConstraint { body })
}

fn reenc_leaf(l: &ClientLeaf, sk: &sde_core::ServerKeySet, params: &PublicParams) -> ConstraintLeaf {
    ConstraintLeaf {
        cipher: server_reenc(&l.cipher, sk, params),
        trapdoor: server_td(&l.trapdoor, sk, params),
    }
}

/// Server round of deployment.
pub fn constraint_deploy(
    client: &ClientConstraint,
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
    store: &mut ConstraintStore,
) -> Result<u64, EgrantError> {
    let sk = keystore.get(admin_id)?;
    let body = match &client.body {
        EncryptedConstraint::Hbdsod(h) => EncryptedConstraint::Hbdsod(EncryptedHbdsod {
            group: h.group,
            members: h.members.iter().map(|m| reenc_leaf(m, sk, params)).collect(),
            object_type: reenc_leaf(&h.object_type, sk, params),
            context: h.context.iter().map(|c| reenc_leaf(c, sk, params)).collect(),
            bind_instance: h.bind_instance,
        }),
        EncryptedConstraint::Cw(branches) => EncryptedConstraint::Cw(
            branches
                .iter()
                .map(|b| EncryptedCwBranch {
                    object_type: reenc_leaf(&b.object_type, sk, params),
                    domains: b.domains.iter().map(|d| reenc_leaf(d, sk, params)).collect(),
                })
                .collect(),
        ),
    };
    let id = store.next_id;
    store.next_id += 1;
    store.constraints.push(ConstraintTree { constraint_id: id, body });
    Ok(id)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestElement {
    pub label: ElementLabel,
    pub trapdoor: ClientTrapdoor,
    pub cipher: ClientEncryptedElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgrantRequest {
    pub requester_id: String,
    pub elements: Vec<RequestElement>,
}

/// The labeled ⟨R, A, O, I⟩ request plus domain path and expanded context
/// attributes. Each element carries a trapdoor (for constraint matching) and
/// a ciphertext (for the eventual history record).
pub fn request_generate<R: Rng>(
    role: &str,
    action: &str,
    object_type: &str,
    instance: &str,
    domains: &[String],
    context: &policy_model::AttributeSet,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<EgrantRequest, EgrantError> {
    let mut elements = Vec::new();
    let mut push = |label: ElementLabel, text: &str, rng: &mut R| -> Result<(), EgrantError> {
        let e = Element::new(label.kind(), text);
        elements.push(RequestElement {
            label,
            trapdoor: client_td(&e, key, params, rng)?,
            cipher: client_enc(&e, key, params, rng)?,
        });
        Ok(())
    };
    push(ElementLabel::Role, role, rng)?;
    push(ElementLabel::Action, action, rng)?;
    push(ElementLabel::ObjType, object_type, rng)?;
    push(ElementLabel::Instance, instance, rng)?;
    for (i, d) in domains.iter().enumerate() {
        push(ElementLabel::Domain(i as u32 + 1), d, rng)?;
    }
    for c in context.elements() {
        push(ElementLabel::Context, &c, rng)?;
    }
    Ok(EgrantRequest { requester_id: key.user_id.clone(), elements })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryElement {
    pub label: ElementLabel,
    pub cipher: ServerEncryptedElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub elements: Vec<HistoryElement>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessHistory {
    pub records: BTreeMap<String, Vec<SessionRecord>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgrantConfig {
    /// Deny even an exact repeat of the same group member on the same object.
    pub deny_exact_repeat: bool,
}

/// Null constraint (None) trivially satisfies; otherwise leaves are decided
/// by "any request trapdoor matches this leaf's ciphertext" and gates by
/// k-counting.
pub fn check_tree_satisfiability(
    tree: Option<&TreeNode<ConstraintLeaf>>,
    req_tds: &[ServerTrapdoor],
    params: &PublicParams,
) -> bool {
    match tree {
        None => true,
        Some(t) => t.evaluate(
            &mut |leaf: &ConstraintLeaf| req_tds.iter().any(|td| match_element(&leaf.cipher, td, params)),
            false,
        ),
    }
}

fn record_matches(rec: &SessionRecord, label: ElementLabel, td: &ServerTrapdoor, params: &PublicParams) -> bool {
    rec.elements
        .iter()
        .any(|e| e.label == label && match_element(&e.cipher, td, params))
}

struct ServerSideRequest<'a> {
    tds: Vec<(ElementLabel, ServerTrapdoor)>,
    req: &'a EgrantRequest,
}

impl ServerSideRequest<'_> {
    fn td(&self, label: ElementLabel) -> Option<&ServerTrapdoor> {
        self.tds.iter().find(|(l, _)| *l == label).map(|(_, td)| td)
    }

    fn all_tds(&self) -> Vec<ServerTrapdoor> {
        self.tds.iter().map(|(_, td)| td.clone()).collect()
    }
}

fn hbdsod_violation(
    h: &EncryptedHbdsod<ConstraintLeaf>,
    req: &ServerSideRequest<'_>,
    records: &[SessionRecord],
    config: EgrantConfig,
    params: &PublicParams,
) -> bool {
    let group_label = match h.group {
        SodGroup::Actions => ElementLabel::Action,
        SodGroup::Roles => ElementLabel::Role,
    };
    let req_group_td = req.td(group_label);
    // Probe = group members not matched by the request (all members under the
    // strict config), each probed with the constraint's own trapdoor.
    let probe_members: Vec<&ConstraintLeaf> = h
        .members
        .iter()
        .filter(|m| {
            config.deny_exact_repeat
                || !req_group_td.map(|td| match_element(&m.cipher, td, params)).unwrap_or(false)
        })
        .collect();
    records.iter().any(|rec| {
        probe_members.iter().any(|m| record_matches(rec, group_label, &m.trapdoor, params))
            && req
                .td(ElementLabel::ObjType)
                .map(|td| record_matches(rec, ElementLabel::ObjType, td, params))
                .unwrap_or(false)
            && (!h.bind_instance
                || req
                    .td(ElementLabel::Instance)
                    .map(|td| record_matches(rec, ElementLabel::Instance, td, params))
                    .unwrap_or(false))
            && h.context
                .iter()
                .all(|c| record_matches(rec, ElementLabel::Context, &c.trapdoor, params))
    })
}

fn cw_branch_matches_request(
    b: &EncryptedCwBranch<ConstraintLeaf>,
    req_tds: &[ServerTrapdoor],
    params: &PublicParams,
) -> bool {
    std::iter::once(&b.object_type)
        .chain(&b.domains)
        .all(|leaf| req_tds.iter().any(|td| match_element(&leaf.cipher, td, params)))
}

fn cw_branch_matches_record(
    b: &EncryptedCwBranch<ConstraintLeaf>,
    rec: &SessionRecord,
    params: &PublicParams,
) -> bool {
    record_matches(rec, ElementLabel::ObjType, &b.object_type.trapdoor, params)
        && b.domains
            .iter()
            .enumerate()
            .all(|(i, d)| record_matches(rec, ElementLabel::Domain(i as u32 + 1), &d.trapdoor, params))
}

/// The atomic evaluate-then-update step. Scans only the requester's own
/// history; on deny the history is untouched, on grant exactly one record is
/// appended.
pub fn constraint_eval_session_up(
    req: &EgrantRequest,
    store: &ConstraintStore,
    history: &mut AccessHistory,
    keystore: &KeyStore,
    params: &PublicParams,
    config: EgrantConfig,
) -> Result<bool, EgrantError> {
    let sk = keystore.get(&req.requester_id)?;
    let server_req = ServerSideRequest {
        tds: req
            .elements
            .iter()
            .map(|e| (e.label, server_td(&e.trapdoor, sk, params)))
            .collect(),
        req,
    };
    let all_tds = server_req.all_tds();
    let records = history.records.get(&req.requester_id).cloned().unwrap_or_default();

    for constraint in &store.constraints {
        match &constraint.body {
            EncryptedConstraint::Hbdsod(h) => {
                if check_tree_satisfiability(Some(&constraint.body.tree()), &all_tds, params)
                    && hbdsod_violation(h, &server_req, &records, config, params)
                {
                    return Ok(false);
                }
            }
            EncryptedConstraint::Cw(branches) => {
                let matched: Vec<bool> = branches
                    .iter()
                    .map(|b| cw_branch_matches_request(b, &all_tds, params))
                    .collect();
                if matched.iter().any(|&m| m) {
                    let conflict = branches.iter().zip(&matched).any(|(b, &m)| {
                        !m && records.iter().any(|rec| cw_branch_matches_record(b, rec, params))
                    });
                    if conflict {
                        return Ok(false);
                    }
                }
            }
        }
    }

    let record = SessionRecord {
        elements: server_req
            .req
            .elements
            .iter()
            .map(|e| HistoryElement { label: e.label, cipher: server_reenc(&e.cipher, sk, params) })
            .collect(),
    };
    history.records.entry(req.requester_id.clone()).or_default().push(record);
    Ok(true)
}
