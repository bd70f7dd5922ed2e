//! File-backed state with atomic writes.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use egrant_engine::{AccessHistory, ConstraintStore, EgrantConfig};
use erbac_engine::RbacState;
use espoon_engine::PolicyStore;
use sde_core::{KeyStore, PublicParams};

use crate::error::ServiceError;

pub const STORE_FORMAT: &str = "sde-store/1";

/// Everything the service persists. The master secret key never appears
/// here; only per-user server shares do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreRoot {
    pub format: String,
    pub params: PublicParams,
    pub keystore: KeyStore,
    pub policies: PolicyStore,
    pub rbac: RbacState,
    pub constraints: ConstraintStore,
    pub history: AccessHistory,
    pub config: EgrantConfig,
}

impl StoreRoot {
    pub fn new(params: PublicParams) -> Self {
        StoreRoot {
            format: STORE_FORMAT.to_string(),
            params,
            keystore: KeyStore::new(),
            policies: PolicyStore::new(),
            rbac: RbacState::default(),
            constraints: ConstraintStore::new(),
            history: AccessHistory::default(),
            config: EgrantConfig::default(),
        }
    }
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, ServiceError> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

/// Write-to-temp plus rename: readers observe either the old or the new
/// image, never a torn one.
pub fn save_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<(), ServiceError> {
    let bytes = serde_json::to_vec_pretty(value)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_store(path: &Path) -> Result<StoreRoot, ServiceError> {
    let root: StoreRoot = load_json(path)?;
    if root.format != STORE_FORMAT {
        return Err(ServiceError::BadFormat(path.display().to_string(), root.format));
    }
    Ok(root)
}
