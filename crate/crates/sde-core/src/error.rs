use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdeError {
    #[error("prime generation failed after {0} attempts")]
    GenerationFailed(usize),
    #[error("security_bits too small: {0} (minimum 8)")]
    SecurityBitsTooSmall(u32),
    #[error("element is empty after canonicalization")]
    EmptyElement,
    #[error("user id must be non-empty")]
    EmptyUserId,
    #[error("no server key for user {0}")]
    UserNotFound(String),
    #[error("malformed hex field: {0}")]
    MalformedHex(String),
}
