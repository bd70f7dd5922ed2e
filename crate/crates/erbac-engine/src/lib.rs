//! Encrypted RBAC on top of the element primitives: assignment lists and
//! permission lists are element-wise encrypted, the role hierarchy stores a
//! (ciphertext, trapdoor) pair per node, and sessions hold the active roles
//! per requester.

use std::collections::{BTreeMap, VecDeque};

use policy_model::{Compiled, ConditionExpr, TreeNode};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use espoon_engine::{condition_enc, condition_reenc, EncryptedAttributeList, EspoonError};
use sde_core::{
    client_enc, client_td, match_element, server_reenc, server_td, ClientEncryptedElement,
    ClientKeySet, ClientTrapdoor, Element, ElementKind, KeyStore, PublicParams, SdeError,
    ServerEncryptedElement, ServerTrapdoor,
};

#[derive(Debug, Error)]
pub enum ErbacError {
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Policy(#[from] policy_model::PolicyError),
    #[error("role hierarchy contains a cycle")]
    InvalidHierarchy,
    #[error("hierarchy edge references node {0} out of bounds")]
    BadEdge(usize),
}

impl From<EspoonError> for ErbacError {
    fn from(e: EspoonError) -> Self {
        match e {
            EspoonError::Sde(e) => ErbacError::Sde(e),
            EspoonError::Policy(e) => ErbacError::Policy(e),
            // Conditions here go through EncryptedCondition::Never instead.
            EspoonError::UnsatisfiableCondition => unreachable!("handled before encryption"),
        }
    }
}

/// A condition after encryption. Absence is modeled by `Option`; a condition
/// that compiled to constant false becomes `Never` (deployable, never holds).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClientCondition {
    Never,
    Tree(TreeNode<ClientEncryptedElement>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ServerCondition {
    Never,
    Tree(TreeNode<ServerEncryptedElement>),
}

fn encrypt_condition<R: Rng>(
    cond: Option<&ConditionExpr>,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<Option<ClientCondition>, ErbacError> {
    Ok(match cond {
        None => None,
        Some(expr) => match expr.compile()? {
            Compiled::Always(true) => None,
            Compiled::Always(false) => Some(ClientCondition::Never),
            Compiled::Tree(t) => Some(ClientCondition::Tree(condition_enc(&t, key, params, rng)?)),
        },
    })
}

fn reenc_condition(
    cond: &Option<ClientCondition>,
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<Option<ServerCondition>, ErbacError> {
    Ok(match cond {
        None => None,
        Some(ClientCondition::Never) => Some(ServerCondition::Never),
        Some(ClientCondition::Tree(t)) => {
            Some(ServerCondition::Tree(condition_reenc(t, admin_id, keystore, params)?))
        }
    })
}

fn condition_holds(
    cond: &Option<ServerCondition>,
    attr_tds: &[ServerTrapdoor],
    params: &PublicParams,
) -> bool {
    match cond {
        None => true,
        Some(ServerCondition::Never) => false,
        Some(ServerCondition::Tree(t)) => {
            t.evaluate(&mut |leaf| attr_tds.iter().any(|td| match_element(leaf, td, params)), true)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientRoleAssignment {
    pub roles: Vec<ClientEncryptedElement>,
    pub activation: Option<ClientCondition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleAssignment {
    pub requester_id: String,
    pub roles: Vec<ServerEncryptedElement>,
    pub activation: Option<ServerCondition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientPermissionAssignment {
    pub role: ClientEncryptedElement,
    pub permissions: Vec<(ClientEncryptedElement, ClientEncryptedElement)>,
    pub grant: Option<ClientCondition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermissionAssignment {
    pub role: ServerEncryptedElement,
    pub permissions: Vec<(ServerEncryptedElement, ServerEncryptedElement)>,
    pub grant: Option<ServerCondition>,
}

/// Cleartext hierarchy as deployed by the admin: node list plus
/// derived-index → base-index edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleartextHierarchy {
    pub roles: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientHierarchy {
    pub nodes: Vec<(ClientEncryptedElement, ClientTrapdoor)>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleHierarchyGraph {
    pub nodes: Vec<(ServerEncryptedElement, ServerTrapdoor)>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionEntry {
    pub trapdoor: ServerTrapdoor,
    pub cipher: ServerEncryptedElement,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbacState {
    pub assignments: BTreeMap<String, RoleAssignment>,
    pub permissions: Vec<PermissionAssignment>,
    pub hierarchy: Option<RoleHierarchyGraph>,
    pub session: BTreeMap<String, Vec<SessionEntry>>,
}

fn role_element(role: &str) -> Element {
    Element::new(ElementKind::Role, role)
}

pub fn role_assignment_client<R: Rng>(
    roles: &[String],
    activation: Option<&ConditionExpr>,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<ClientRoleAssignment, ErbacError> {
    Ok(ClientRoleAssignment {
        roles: roles
            .iter()
            .map(|r| client_enc(&role_element(r), key, params, rng))
            .collect::<Result<_, _>>()?,
        activation: encrypt_condition(activation, key, params, rng)?,
    })
}

/// Server round; replaces any previous assignment for the requester.
pub fn role_assignment_deploy(
    client: &ClientRoleAssignment,
    requester_id: &str,
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
    state: &mut RbacState,
) -> Result<(), ErbacError> {
    let sk = keystore.get(admin_id)?;
    let roles = client.roles.iter().map(|c| server_reenc(c, sk, params)).collect();
    let activation = reenc_condition(&client.activation, admin_id, keystore, params)?;
    state
        .assignments
        .insert(requester_id.to_string(), RoleAssignment { requester_id: requester_id.to_string(), roles, activation });
    Ok(())
}

pub fn permission_assignment_client<R: Rng>(
    role: &str,
    perms: &[(String, String)],
    grant: Option<&ConditionExpr>,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<ClientPermissionAssignment, ErbacError> {
    Ok(ClientPermissionAssignment {
        role: client_enc(&role_element(role), key, params, rng)?,
        permissions: perms
            .iter()
            .map(|(a, t)| {
                Ok((
                    client_enc(&Element::new(ElementKind::Action, a), key, params, rng)?,
                    client_enc(&Element::new(ElementKind::Target, t), key, params, rng)?,
                ))
            })
            .collect::<Result<_, ErbacError>>()?,
        grant: encrypt_condition(grant, key, params, rng)?,
    })
}

pub fn permission_assignment_deploy(
    client: &ClientPermissionAssignment,
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
    state: &mut RbacState,
) -> Result<(), ErbacError> {
    let sk = keystore.get(admin_id)?;
    state.permissions.push(PermissionAssignment {
        role: server_reenc(&client.role, sk, params),
        permissions: client
            .permissions
            .iter()
            .map(|(a, t)| (server_reenc(a, sk, params), server_reenc(t, sk, params)))
            .collect(),
        grant: reenc_condition(&client.grant, admin_id, keystore, params)?,
    });
    Ok(())
}

impl CleartextHierarchy {
    /// Rejects dangling edge indices and cycles (Kahn's algorithm).
    pub fn validate(&self) -> Result<(), ErbacError> {
        let n = self.roles.len();
        let mut indegree = vec![0usize; n];
        for &(d, b) in &self.edges {
            if d >= n {
                return Err(ErbacError::BadEdge(d));
            }
            if b >= n {
                return Err(ErbacError::BadEdge(b));
            }
            indegree[b] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop_front() {
            seen += 1;
            for &(d, b) in &self.edges {
                if d == i {
                    indegree[b] -= 1;
                    if indegree[b] == 0 {
                        queue.push_back(b);
                    }
                }
            }
        }
        if seen == n {
            Ok(())
        } else {
            Err(ErbacError::InvalidHierarchy)
        }
    }
}

pub fn hierarchy_client<R: Rng>(
    graph: &CleartextHierarchy,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<ClientHierarchy, ErbacError> {
    graph.validate()?;
    Ok(ClientHierarchy {
        nodes: graph
            .roles
            .iter()
            .map(|r| {
                Ok((
                    client_enc(&role_element(r), key, params, rng)?,
                    client_td(&role_element(r), key, params, rng)?,
                ))
            })
            .collect::<Result<_, ErbacError>>()?,
        edges: graph.edges.clone(),
    })
}

pub fn hierarchy_deploy(
    client: &ClientHierarchy,
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
    state: &mut RbacState,
) -> Result<(), ErbacError> {
    let sk = keystore.get(admin_id)?;
    state.hierarchy = Some(RoleHierarchyGraph {
        nodes: client
            .nodes
            .iter()
            .map(|(c, td)| (server_reenc(c, sk, params), server_td(td, sk, params)))
            .collect(),
        edges: client.edges.clone(),
    });
    Ok(())
}

/// A single-role request (activation or deactivation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleRequest {
    pub requester_id: String,
    pub trapdoor: ClientTrapdoor,
}

pub fn role_request<R: Rng>(
    role: &str,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<RoleRequest, ErbacError> {
    Ok(RoleRequest {
        requester_id: key.user_id.clone(),
        trapdoor: client_td(&role_element(role), key, params, rng)?,
    })
}

fn attr_server_tds(
    attrs: &EncryptedAttributeList,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<Vec<ServerTrapdoor>, ErbacError> {
    let sk = keystore.get(&attrs.source_id)?;
    Ok(attrs.items.iter().map(|td| server_td(td, sk, params)).collect())
}

/// Activation: the requested role must sit in the requester's assignment list
/// and the activation condition (if any) must hold right now. On success the
/// session gains one (trapdoor, cipher) entry.
pub fn activate_role(
    req: &RoleRequest,
    attrs: &EncryptedAttributeList,
    state: &mut RbacState,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<bool, ErbacError> {
    let sk = keystore.get(&req.requester_id)?;
    let td = server_td(&req.trapdoor, sk, params);
    let Some(assignment) = state.assignments.get(&req.requester_id) else { return Ok(false) };
    let Some(cipher) = assignment.roles.iter().find(|c| match_element(c, &td, params)) else {
        return Ok(false);
    };
    if assignment.activation.is_some() {
        let tds = attr_server_tds(attrs, keystore, params)?;
        if !condition_holds(&assignment.activation, &tds, params) {
            return Ok(false);
        }
    }
    let cipher = cipher.clone();
    state
        .session
        .entry(req.requester_id.clone())
        .or_default()
        .push(SessionEntry { trapdoor: td, cipher });
    Ok(true)
}

/// Deactivation removes every session entry matching the role. Returns
/// whether anything was removed.
pub fn deactivate_role(
    req: &RoleRequest,
    state: &mut RbacState,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<bool, ErbacError> {
    let sk = keystore.get(&req.requester_id)?;
    let td = server_td(&req.trapdoor, sk, params);
    let Some(entries) = state.session.get_mut(&req.requester_id) else { return Ok(false) };
    let before = entries.len();
    entries.retain(|e| !match_element(&e.cipher, &td, params));
    Ok(entries.len() != before)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessRequest {
    pub requester_id: String,
    pub role: ClientTrapdoor,
    pub action: ClientTrapdoor,
    pub target: ClientTrapdoor,
}

pub fn access_request_make<R: Rng>(
    role: &str,
    action: &str,
    target: &str,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<AccessRequest, ErbacError> {
    Ok(AccessRequest {
        requester_id: key.user_id.clone(),
        role: client_td(&role_element(role), key, params, rng)?,
        action: client_td(&Element::new(ElementKind::Action, action), key, params, rng)?,
        target: client_td(&Element::new(ElementKind::Target, target), key, params, rng)?,
    })
}

fn permission_hit(
    pa: &PermissionAssignment,
    action_td: &ServerTrapdoor,
    target_td: &ServerTrapdoor,
    attr_tds: &[ServerTrapdoor],
    params: &PublicParams,
) -> bool {
    pa.permissions
        .iter()
        .any(|(a, t)| match_element(a, action_td, params) && match_element(t, target_td, params))
        && condition_holds(&pa.grant, attr_tds, params)
}

/// Access evaluation: session gate, the role's own permission lists (reusing
/// the already-computed role trapdoor), then the hierarchy walked
/// breadth-first using the stored per-node trapdoors.
pub fn access_request(
    req: &AccessRequest,
    attrs: &EncryptedAttributeList,
    state: &RbacState,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<bool, ErbacError> {
    let sk = keystore.get(&req.requester_id)?;
    let role_td = server_td(&req.role, sk, params);
    let active = state
        .session
        .get(&req.requester_id)
        .map(|es| es.iter().any(|e| match_element(&e.cipher, &role_td, params)))
        .unwrap_or(false);
    if !active {
        return Ok(false);
    }
    let action_td = server_td(&req.action, sk, params);
    let target_td = server_td(&req.target, sk, params);
    let attr_tds = attr_server_tds(attrs, keystore, params)?;

    // Probe trapdoors in breadth-first inheritance order: the requested role
    // first, then its base roles.
    let mut probes: Vec<ServerTrapdoor> = vec![role_td.clone()];
    if let Some(h) = &state.hierarchy {
        if let Some(start) = h.nodes.iter().position(|(c, _)| match_element(c, &role_td, params)) {
            let mut queue = VecDeque::from([start]);
            let mut seen = vec![false; h.nodes.len()];
            seen[start] = true;
            while let Some(i) = queue.pop_front() {
                for &(d, b) in &h.edges {
                    if d == i && !seen[b] {
                        seen[b] = true;
                        probes.push(h.nodes[b].1.clone());
                        queue.push_back(b);
                    }
                }
            }
        }
    }
    for probe in &probes {
        for pa in &state.permissions {
            if match_element(&pa.role, probe, params)
                && permission_hit(pa, &action_td, &target_td, &attr_tds, params)
            {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
