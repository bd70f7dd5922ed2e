use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("key already issued for user {0}")]
    AlreadyIssued(String),
    #[error("store file {0} has unsupported format tag {1}")]
    BadFormat(String, String),
    #[error("store parameters do not match the key file")]
    ParamsMismatch,
    #[error("wire frame exceeds {0} bytes")]
    FrameTooLarge(usize),
    #[error(transparent)]
    Sde(#[from] sde_core::SdeError),
    #[error(transparent)]
    Espoon(#[from] espoon_engine::EspoonError),
    #[error(transparent)]
    Erbac(#[from] erbac_engine::ErbacError),
    #[error(transparent)]
    Egrant(#[from] egrant_engine::EgrantError),
    #[error("{0}")]
    Other(String),
}
