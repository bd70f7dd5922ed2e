//! The offline trusted key management authority: holds the master secret,
//! issues per-user key splits, tracks what has been issued.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use sde_core::{init_with_profile, keygen, ClientKeySet, GroupProfile, MasterSecretKey, PublicParams, ServerKeySet};

use crate::error::ServiceError;

pub const TKMA_FORMAT: &str = "sde-tkma/1";
pub const CLIENT_KEY_FORMAT: &str = "sde-client-key/1";
pub const SERVER_KEY_FORMAT: &str = "sde-server-key/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TkmaState {
    pub format: String,
    pub params: PublicParams,
    pub msk: MasterSecretKey,
    pub issued: BTreeSet<String>,
}

/// Delivered out of band to the user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientKeyFile {
    pub format: String,
    pub params: PublicParams,
    pub client: ClientKeySet,
}

/// Imported by the service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerKeyFile {
    pub format: String,
    pub params: PublicParams,
    pub server: ServerKeySet,
}

pub fn tkma_init<R: Rng>(profile: GroupProfile, rng: &mut R) -> Result<TkmaState, ServiceError> {
    let (params, msk) = init_with_profile(profile, rng)?;
    Ok(TkmaState { format: TKMA_FORMAT.to_string(), params, msk, issued: BTreeSet::new() })
}

pub fn tkma_issue<R: Rng>(
    state: &mut TkmaState,
    user_id: &str,
    rng: &mut R,
) -> Result<(ClientKeyFile, ServerKeyFile), ServiceError> {
    if state.issued.contains(user_id) {
        return Err(ServiceError::AlreadyIssued(user_id.to_string()));
    }
    let (client, server) = keygen(&state.msk, &state.params, user_id, rng)?;
    state.issued.insert(user_id.to_string());
    Ok((
        ClientKeyFile {
            format: CLIENT_KEY_FORMAT.to_string(),
            params: state.params.clone(),
            client,
        },
        ServerKeyFile {
            format: SERVER_KEY_FORMAT.to_string(),
            params: state.params.clone(),
            server,
        },
    ))
}

/// Re-issue after revocation: forget the id so `tkma_issue` accepts it again.
pub fn tkma_forget(state: &mut TkmaState, user_id: &str) -> bool {
    state.issued.remove(user_id)
}
