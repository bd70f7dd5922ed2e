//! Deployable shell around the encrypted policy engines: file-backed store,
//! offline key authority, a TCP wire protocol, and the verb dispatcher shared
//! by both.

pub mod error;
pub mod service;
pub mod store;
pub mod tkma;
pub mod wire;

pub use error::ServiceError;
pub use service::{apply, serve, Request, Response};
pub use store::{load_json, load_store, save_json_atomic, StoreRoot, STORE_FORMAT};
pub use tkma::{tkma_forget, tkma_init, tkma_issue, ClientKeyFile, ServerKeyFile, TkmaState};
