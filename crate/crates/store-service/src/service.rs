//! The verb set shared by the CLI and the TCP server. Every verb is a plain
//! function of (request, store) so that in-process and over-the-wire
//! execution cannot diverge.

use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use egrant_engine::{constraint_deploy, constraint_eval_session_up, ClientConstraint, EgrantRequest};
use erbac_engine::{
    access_request, activate_role, deactivate_role, hierarchy_deploy, permission_assignment_deploy,
    role_assignment_deploy, AccessRequest, ClientHierarchy, ClientPermissionAssignment,
    ClientRoleAssignment, RoleRequest,
};
use espoon_engine::{
    evaluate_request, policy_server_deploy, user_revocation, ClientPolicy, EncryptedAttributeList,
    EncryptedRequestTuple,
};
use sde_core::{reset_counters, snapshot_counters, OpCounters, PublicParams, ServerKeySet};

use crate::error::ServiceError;
use crate::store::{save_json_atomic, StoreRoot};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verb", content = "payload", rename_all = "kebab-case")]
pub enum Request {
    ImportKey { params: PublicParams, server: ServerKeySet },
    DeployPolicy { admin_id: String, policy: ClientPolicy },
    DeletePolicy { policy_id: u64 },
    Evaluate { request: EncryptedRequestTuple, attrs: EncryptedAttributeList },
    RevokeUser { user_id: String },
    AssignRoles { admin_id: String, requester_id: String, assignment: ClientRoleAssignment },
    AssignPermissions { admin_id: String, assignment: ClientPermissionAssignment },
    DeployHierarchy { admin_id: String, hierarchy: ClientHierarchy },
    Activate { request: RoleRequest, attrs: EncryptedAttributeList },
    Deactivate { request: RoleRequest },
    Access { request: AccessRequest, attrs: EncryptedAttributeList },
    DeployConstraint { admin_id: String, constraint: ClientConstraint },
    DeleteConstraint { constraint_id: u64 },
    Egrant { request: EgrantRequest },
    Dump,
}

impl Request {
    /// Whether a successful application changes the store. Session and
    /// history updates count; pure decisions do not.
    pub fn mutates(&self) -> bool {
        !matches!(self, Request::Evaluate { .. } | Request::Access { .. } | Request::Dump)
    }

    pub fn verb(&self) -> &'static str {
        match self {
            Request::ImportKey { .. } => "import-key",
            Request::DeployPolicy { .. } => "deploy-policy",
            Request::DeletePolicy { .. } => "delete-policy",
            Request::Evaluate { .. } => "evaluate",
            Request::RevokeUser { .. } => "revoke-user",
            Request::AssignRoles { .. } => "assign-roles",
            Request::AssignPermissions { .. } => "assign-permissions",
            Request::DeployHierarchy { .. } => "deploy-hierarchy",
            Request::Activate { .. } => "activate",
            Request::Deactivate { .. } => "deactivate",
            Request::Access { .. } => "access",
            Request::DeployConstraint { .. } => "deploy-constraint",
            Request::DeleteConstraint { .. } => "delete-constraint",
            Request::Egrant { .. } => "egrant",
            Request::Dump => "dump",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counters: Option<OpCounters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<Box<StoreRoot>>,
}

impl Response {
    fn ok() -> Self {
        Response { ok: true, ..Default::default() }
    }

    fn decision(d: bool) -> Self {
        Response { ok: true, decision: Some(d), ..Default::default() }
    }

    fn id(id: u64) -> Self {
        Response { ok: true, id: Some(id), ..Default::default() }
    }

    fn error(msg: String) -> Self {
        Response { ok: false, error: Some(msg), ..Default::default() }
    }
}

fn apply_inner(req: &Request, store: &mut StoreRoot) -> Result<Response, ServiceError> {
    let params = store.params.clone();
    Ok(match req {
        Request::ImportKey { params: key_params, server } => {
            if *key_params != params {
                return Err(ServiceError::ParamsMismatch);
            }
            store.keystore.insert(server.clone());
            Response::ok()
        }
        Request::DeployPolicy { admin_id, policy } => Response::id(policy_server_deploy(
            policy,
            admin_id,
            &store.keystore,
            &params,
            &mut store.policies,
        )?),
        Request::DeletePolicy { policy_id } => Response::decision(store.policies.delete(*policy_id)),
        Request::Evaluate { request, attrs } => Response::decision(evaluate_request(
            request,
            attrs,
            &store.policies,
            &store.keystore,
            &params,
        )?),
        Request::RevokeUser { user_id } => {
            Response::decision(user_revocation(user_id, &mut store.keystore))
        }
        Request::AssignRoles { admin_id, requester_id, assignment } => {
            role_assignment_deploy(
                assignment,
                requester_id,
                admin_id,
                &store.keystore,
                &params,
                &mut store.rbac,
            )?;
            Response::ok()
        }
        Request::AssignPermissions { admin_id, assignment } => {
            permission_assignment_deploy(
                assignment,
                admin_id,
                &store.keystore,
                &params,
                &mut store.rbac,
            )?;
            Response::ok()
        }
        Request::DeployHierarchy { admin_id, hierarchy } => {
            hierarchy_deploy(hierarchy, admin_id, &store.keystore, &params, &mut store.rbac)?;
            Response::ok()
        }
        Request::Activate { request, attrs } => Response::decision(activate_role(
            request,
            attrs,
            &mut store.rbac,
            &store.keystore,
            &params,
        )?),
        Request::Deactivate { request } => {
            Response::decision(deactivate_role(request, &mut store.rbac, &store.keystore, &params)?)
        }
        Request::Access { request, attrs } => Response::decision(access_request(
            request,
            attrs,
            &store.rbac,
            &store.keystore,
            &params,
        )?),
        Request::DeployConstraint { admin_id, constraint } => Response::id(constraint_deploy(
            constraint,
            admin_id,
            &store.keystore,
            &params,
            &mut store.constraints,
        )?),
        Request::DeleteConstraint { constraint_id } => {
            Response::decision(store.constraints.delete(*constraint_id))
        }
        Request::Egrant { request } => Response::decision(constraint_eval_session_up(
            request,
            &store.constraints,
            &mut store.history,
            &store.keystore,
            &params,
            store.config,
        )?),
        Request::Dump => {
            Response { ok: true, dump: Some(Box::new(store.clone())), ..Default::default() }
        }
    })
}

/// Applies one verb and attaches the element-operation counts it incurred.
/// Errors are folded into the response; the caller only sees transport
/// failures as `Err`.
pub fn apply(req: &Request, store: &mut StoreRoot) -> Response {
    reset_counters();
    let mut resp = match apply_inner(req, store) {
        Ok(r) => r,
        Err(e) => Response::error(format!("{} failed: {e}", req.verb())),
    };
    resp.counters = Some(snapshot_counters());
    resp
}

/// Serves requests on a TCP listener, one thread per connection, all of them
/// funneled through a single store lock. The lock makes each verb — in
/// particular the evaluate-then-append history update — atomic with respect
/// to every other connection.
pub fn serve(listener: TcpListener, store: StoreRoot, path: PathBuf) -> Result<(), ServiceError> {
    let shared = Arc::new(Mutex::new(store));
    for conn in listener.incoming() {
        let mut conn = conn?;
        let shared = Arc::clone(&shared);
        let path = path.clone();
        std::thread::spawn(move || {
            loop {
                let req: Request = match crate::wire::read_frame(&mut conn) {
                    Ok(Some(r)) => r,
                    Ok(None) => return,
                    Err(e) => {
                        let resp = Response::error(format!("protocol error: {e}"));
                        let _ = crate::wire::write_frame(&mut conn, &resp);
                        return;
                    }
                };
                let resp = {
                    let mut store = shared.lock().expect("store lock");
                    let resp = apply(&req, &mut store);
                    if resp.ok && req.mutates() {
                        if let Err(e) = save_json_atomic(&path, &*store) {
                            Response::error(format!("persist failed: {e}"))
                        } else {
                            resp
                        }
                    } else {
                        resp
                    }
                };
                if crate::wire::write_frame(&mut conn, &resp).is_err() {
                    return;
                }
            }
        });
    }
    Ok(())
}
