//! The collision-resistant hash applied to group elements.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashId {
    Sha256,
    /// Emits the encoded element bytes unchanged. Test groups only, so toy
    /// fixtures can assert digests by hand.
    ToyIdentity,
}

impl HashId {
    /// H applied to the fixed-width big-endian encoding of a group element.
    /// The width is the byte length of p, so matching is bit-exact across
    /// implementations.
    pub fn digest(&self, z: &BigUint, p: &BigUint) -> Vec<u8> {
        let width = ((p.bits() + 7) / 8) as usize;
        let mut bytes = z.to_bytes_be();
        while bytes.len() < width {
            bytes.insert(0, 0);
        }
        match self {
            HashId::Sha256 => Sha256::digest(&bytes).to_vec(),
            HashId::ToyIdentity => bytes,
        }
    }

    pub fn output_len(&self, p: &BigUint) -> usize {
        match self {
            HashId::Sha256 => 32,
            HashId::ToyIdentity => ((p.bits() + 7) / 8) as usize,
        }
    }
}
