use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("gate must have at least one child")]
    EmptyGate,
    #[error("k-of-n threshold {k} out of range for {n} children")]
    BadThreshold { k: usize, n: usize },
    #[error("bit width {0} out of range (1..=64)")]
    BadBitWidth(u32),
    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: u32 },
    #[error("duplicate attribute {0}")]
    DuplicateAttribute(String),
    #[error("empty attribute name")]
    EmptyAttributeName,
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

impl PolicyError {
    pub(crate) fn parse(at: usize, msg: impl Into<String>) -> Self {
        PolicyError::Parse { at, msg: msg.into() }
    }
}
