//! Multi-user searchable encryption over a Schnorr-style subgroup.
//!
//! Every user holds one half of a split master exponent; the server holds the
//! other half. Two-round encryption (client then server) brings ciphertexts
//! from any user into a single master-keyed form, and the same trick applied
//! to trapdoors lets the server test element equality without ever seeing
//! cleartext.

mod counters;
mod element;
mod error;
mod group;
mod hash;
mod keys;
mod ops;
mod prf;
pub mod serial;

pub use counters::{reset_counters, snapshot_counters, OpCounters};
pub use element::{Element, ElementKind};
pub use error::SdeError;
pub use group::{generate_group, is_probable_prime, GroupDescription};
pub use hash::HashId;
pub use keys::{
    init, init_with_profile, keygen, ClientKeySet, GroupProfile, KeyStore, MasterSecretKey,
    PublicParams, ServerKeySet,
};
pub use ops::{
    client_enc, client_enc_with_randomness, client_td, client_td_with_randomness, match_element,
    server_reenc, server_td, ClientEncryptedElement, ClientTrapdoor, ServerEncryptedElement,
    ServerTrapdoor,
};
pub use prf::PrfId;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Builds the RNG used by every randomized operation: OS-seeded by default,
/// or a fixed stream when a deterministic seed is supplied.
pub fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}
