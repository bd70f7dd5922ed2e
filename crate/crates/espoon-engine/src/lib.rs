//! The base encrypted-policy lifecycle. Admins deploy ⟨S,A,T⟩ policies with
//! condition trees in two rounds (client encryption, server re-encryption);
//! requesters submit trapdoor tuples; the server searches and evaluates
//! without ever seeing cleartext elements.

use policy_model::{Compiled, PolicyStatement, SatTuple, TreeNode};
use rand::Rng;
use serde::{Deserialize, Serialize};

use sde_core::{
    client_enc, client_td, match_element, server_reenc, server_td, ClientEncryptedElement,
    ClientKeySet, ClientTrapdoor, Element, ElementKind, KeyStore, PublicParams, SdeError,
    ServerEncryptedElement, ServerTrapdoor,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EspoonError {
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Policy(#[from] policy_model::PolicyError),
    #[error("policy condition can never be satisfied")]
    UnsatisfiableCondition,
}

/// A policy after the client round: still bound to the deploying admin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientPolicy {
    pub tuple: [ClientEncryptedElement; 3],
    pub condition: Option<TreeNode<ClientEncryptedElement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptedPolicy {
    pub policy_id: u64,
    pub tuple: [ServerEncryptedElement; 3],
    pub condition: Option<TreeNode<ServerEncryptedElement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptedRequestTuple {
    pub requester_id: String,
    pub trapdoors: [ClientTrapdoor; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptedAttributeList {
    pub source_id: String,
    pub items: Vec<ClientTrapdoor>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyStore {
    pub policies: Vec<EncryptedPolicy>,
    next_id: u64,
}

impl PolicyStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, tuple: [ServerEncryptedElement; 3], condition: Option<TreeNode<ServerEncryptedElement>>) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.policies.push(EncryptedPolicy { policy_id: id, tuple, condition });
        id
    }

    pub fn delete(&mut self, policy_id: u64) -> bool {
        let before = self.policies.len();
        self.policies.retain(|p| p.policy_id != policy_id);
        self.policies.len() != before
    }

    pub fn get(&self, policy_id: u64) -> Option<&EncryptedPolicy> {
        self.policies.iter().find(|p| p.policy_id == policy_id)
    }
}

fn tuple_elements(t: &SatTuple) -> [Element; 3] {
    [
        Element::new(ElementKind::Subject, &t.subject),
        Element::new(ElementKind::Action, &t.action),
        Element::new(ElementKind::Target, &t.target),
    ]
}

pub fn condition_enc<R: Rng>(
    tree: &TreeNode<String>,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<TreeNode<ClientEncryptedElement>, EspoonError> {
    Ok(tree.try_map_leaves(&mut |leaf: &String| {
        client_enc(&Element::new(ElementKind::Attribute, leaf), key, params, rng)
    })?)
}

pub fn condition_reenc(
    tree: &TreeNode<ClientEncryptedElement>,
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<TreeNode<ServerEncryptedElement>, EspoonError> {
    let sk = keystore.get(admin_id)?;
    Ok(tree.map_leaves(&mut |leaf| server_reenc(leaf, sk, params)))
}

pub fn sat_enc<R: Rng>(
    t: &SatTuple,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<[ClientEncryptedElement; 3], EspoonError> {
    let [s, a, o] = tuple_elements(t);
    Ok([
        client_enc(&s, key, params, rng)?,
        client_enc(&a, key, params, rng)?,
        client_enc(&o, key, params, rng)?,
    ])
}

pub fn sat_reenc(
    tuple: &[ClientEncryptedElement; 3],
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<[ServerEncryptedElement; 3], EspoonError> {
    let sk = keystore.get(admin_id)?;
    Ok([
        server_reenc(&tuple[0], sk, params),
        server_reenc(&tuple[1], sk, params),
        server_reenc(&tuple[2], sk, params),
    ])
}

/// Client round of policy deployment. A condition that compiles to constant
/// true is dropped; constant false is refused — deploying it could never
/// permit anything.
pub fn policy_client_deploy<R: Rng>(
    statement: &PolicyStatement,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<ClientPolicy, EspoonError> {
    statement.tuple.validate()?;
    let condition = match &statement.condition {
        None => None,
        Some(expr) => match expr.compile()? {
            Compiled::Always(true) => None,
            Compiled::Always(false) => return Err(EspoonError::UnsatisfiableCondition),
            Compiled::Tree(t) => Some(condition_enc(&t, key, params, rng)?),
        },
    };
    Ok(ClientPolicy { tuple: sat_enc(&statement.tuple, key, params, rng)?, condition })
}

/// Server round: re-encrypt under the admin's server key and store.
pub fn policy_server_deploy(
    policy: &ClientPolicy,
    admin_id: &str,
    keystore: &KeyStore,
    params: &PublicParams,
    store: &mut PolicyStore,
) -> Result<u64, EspoonError> {
    let tuple = sat_reenc(&policy.tuple, admin_id, keystore, params)?;
    let condition = policy
        .condition
        .as_ref()
        .map(|t| condition_reenc(t, admin_id, keystore, params))
        .transpose()?;
    Ok(store.insert(tuple, condition))
}

pub fn sat_request<R: Rng>(
    t: &SatTuple,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<EncryptedRequestTuple, EspoonError> {
    let [s, a, o] = tuple_elements(t);
    Ok(EncryptedRequestTuple {
        requester_id: key.user_id.clone(),
        trapdoors: [
            client_td(&s, key, params, rng)?,
            client_td(&a, key, params, rng)?,
            client_td(&o, key, params, rng)?,
        ],
    })
}

/// All policies whose ⟨S,A,T⟩ tuple matches the request. The caller ORs
/// condition evaluations over the hits.
pub fn sat_search(
    req: &EncryptedRequestTuple,
    store: &PolicyStore,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<Vec<u64>, EspoonError> {
    let sk = keystore.get(&req.requester_id)?;
    let tds: Vec<ServerTrapdoor> =
        req.trapdoors.iter().map(|td| server_td(td, sk, params)).collect();
    Ok(store
        .policies
        .iter()
        .filter(|p| p.tuple.iter().zip(&tds).all(|(c, td)| match_element(c, td, params)))
        .map(|p| p.policy_id)
        .collect())
}

/// One trapdoor per attribute element string (bit patterns included).
pub fn attributes_request<R: Rng>(
    attrs: &policy_model::AttributeSet,
    key: &ClientKeySet,
    params: &PublicParams,
    rng: &mut R,
) -> Result<EncryptedAttributeList, EspoonError> {
    let items = attrs
        .elements()
        .iter()
        .map(|e| client_td(&Element::new(ElementKind::Attribute, e), key, params, rng))
        .collect::<Result<_, _>>()?;
    Ok(EncryptedAttributeList { source_id: key.user_id.clone(), items })
}

/// Evaluate one policy's condition: a leaf holds iff any attribute trapdoor
/// matches it. Absent condition → true.
pub fn condition_evaluation(
    attrs: &EncryptedAttributeList,
    policy: &EncryptedPolicy,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<bool, EspoonError> {
    let Some(cond) = &policy.condition else { return Ok(true) };
    let sk = keystore.get(&attrs.source_id)?;
    let tds: Vec<ServerTrapdoor> = attrs.items.iter().map(|td| server_td(td, sk, params)).collect();
    Ok(cond.evaluate(&mut |leaf| tds.iter().any(|td| match_element(leaf, td, params)), true))
}

/// Full decision: permit iff any tuple hit has a satisfied condition.
pub fn evaluate_request(
    req: &EncryptedRequestTuple,
    attrs: &EncryptedAttributeList,
    store: &PolicyStore,
    keystore: &KeyStore,
    params: &PublicParams,
) -> Result<bool, EspoonError> {
    for id in sat_search(req, store, keystore, params)? {
        let policy = store.get(id).expect("id came from the store");
        if condition_evaluation(attrs, policy, keystore, params)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Removes the user's server-side key share; stored policies are untouched.
pub fn user_revocation(user_id: &str, keystore: &mut KeyStore) -> bool {
    keystore.revoke(user_id)
}
