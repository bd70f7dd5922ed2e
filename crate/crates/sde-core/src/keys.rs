//! System parameters, master keys and per-user key splitting.

use num_bigint::BigUint;
use num_traits::{Num, One};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::SdeError;
use crate::group::{generate_group, random_exponent, sub_mod};
use crate::hash::HashId;
use crate::prf::PrfId;
use crate::serial::biguint_hex;

/// Named parameter profiles. `Toy` pins the tiny hand-checkable group;
/// `Prod` uses a pre-generated 2048/256-bit group; `Custom` generates a
/// fresh group of the given widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupProfile {
    Toy,
    Test,
    Prod,
    Custom { p_bits: u32, q_bits: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicParams {
    #[serde(with = "biguint_hex")]
    pub p: BigUint,
    #[serde(with = "biguint_hex")]
    pub q: BigUint,
    #[serde(with = "biguint_hex")]
    pub g: BigUint,
    #[serde(with = "biguint_hex")]
    pub h: BigUint,
    pub hash_id: HashId,
    pub prf_id: PrfId,
    pub security_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasterSecretKey {
    #[serde(with = "biguint_hex")]
    pub x: BigUint,
    #[serde(with = "hex::serde")]
    pub s: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientKeySet {
    pub user_id: String,
    #[serde(with = "biguint_hex")]
    pub x1: BigUint,
    #[serde(with = "hex::serde")]
    pub s: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerKeySet {
    pub user_id: String,
    #[serde(with = "biguint_hex")]
    pub x2: BigUint,
}

/// Server-side map from user identity to its key share. Revocation is
/// deletion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyStore {
    pub entries: BTreeMap<String, ServerKeySet>,
}

impl KeyStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: ServerKeySet) {
        self.entries.insert(key.user_id.clone(), key);
    }

    pub fn get(&self, user_id: &str) -> Result<&ServerKeySet, SdeError> {
        self.entries
            .get(user_id)
            .ok_or_else(|| SdeError::UserNotFound(user_id.to_string()))
    }

    pub fn contains(&self, user_id: &str) -> bool {
        self.entries.contains_key(user_id)
    }

    /// Removes the user's key share. Returns false when no such user exists.
    /// Stored ciphertexts are untouched; they are already master-keyed.
    pub fn revoke(&mut self, user_id: &str) -> bool {
        self.entries.remove(user_id).is_some()
    }
}

// Pre-generated 2048-bit p with 256-bit q (and a 512/160 test group).
// Both satisfy q | p - 1 with g of order q; the invariants are re-checked in
// tests.
include!("profile_consts.rs");

fn parse_group(p: &str, q: &str, g: &str) -> (BigUint, BigUint, BigUint) {
    (
        BigUint::from_str_radix(p, 16).expect("profile constant"),
        BigUint::from_str_radix(q, 16).expect("profile constant"),
        BigUint::from_str_radix(g, 16).expect("profile constant"),
    )
}

/// System initialization: fixes the group, draws the master exponent x and
/// the PRF key s, and publishes h = g^x.
pub fn init_with_profile(
    profile: GroupProfile,
    rng: &mut impl Rng,
) -> Result<(PublicParams, MasterSecretKey), SdeError> {
    let (p, q, g, hash_id, prf_id, security_bits) = match profile {
        GroupProfile::Toy => (
            BigUint::from(23u32),
            BigUint::from(11u32),
            BigUint::from(2u32),
            HashId::ToyIdentity,
            PrfId::ToyDigits,
            8,
        ),
        GroupProfile::Test => {
            let (p, q, g) = parse_group(TEST_P_HEX, TEST_Q_HEX, TEST_G_HEX);
            (p, q, g, HashId::Sha256, PrfId::HmacSha256, 512)
        }
        GroupProfile::Prod => {
            let (p, q, g) = parse_group(PROD_P_HEX, PROD_Q_HEX, PROD_G_HEX);
            (p, q, g, HashId::Sha256, PrfId::HmacSha256, 2048)
        }
        GroupProfile::Custom { p_bits, q_bits } => {
            if p_bits < 8 {
                return Err(SdeError::SecurityBitsTooSmall(p_bits));
            }
            let desc = generate_group(p_bits, q_bits, rng)?;
            (desc.p, desc.q, desc.g, HashId::Sha256, PrfId::HmacSha256, p_bits)
        }
    };
    let x = random_exponent(&q, rng);
    let h = g.modpow(&x, &p);
    let mut s = vec![0u8; 32];
    rng.fill_bytes(&mut s);
    Ok((
        PublicParams { p, q, g, h, hash_id, prf_id, security_bits },
        MasterSecretKey { x, s },
    ))
}

/// Initialization by security parameter alone: generates a fresh group with
/// a q of half the width of p (capped at 256 bits).
pub fn init(
    security_bits: u32,
    rng: &mut impl Rng,
) -> Result<(PublicParams, MasterSecretKey), SdeError> {
    if security_bits < 8 {
        return Err(SdeError::SecurityBitsTooSmall(security_bits));
    }
    let q_bits = (security_bits / 2).min(256).max(4);
    init_with_profile(GroupProfile::Custom { p_bits: security_bits, q_bits }, rng)
}

/// Splits the master exponent for one user: x1 uniform in Z*_q, x2 = x - x1
/// mod q. The client set carries (x1, s); the server set carries (id, x2).
pub fn keygen(
    msk: &MasterSecretKey,
    params: &PublicParams,
    user_id: &str,
    rng: &mut impl Rng,
) -> Result<(ClientKeySet, ServerKeySet), SdeError> {
    if user_id.is_empty() {
        return Err(SdeError::EmptyUserId);
    }
    let x1 = random_exponent(&params.q, rng);
    let x2 = sub_mod(&msk.x, &x1, &params.q);
    Ok((
        ClientKeySet { user_id: user_id.to_string(), x1, s: msk.s.clone() },
        ServerKeySet { user_id: user_id.to_string(), x2 },
    ))
}

impl PublicParams {
    /// Checks the published group invariants: q | p - 1, g has order q,
    /// g != 1, h in the subgroup.
    pub fn validate(&self) -> bool {
        use num_traits::Zero;
        let one = BigUint::one();
        if ((&self.p - &one) % &self.q) != BigUint::zero() {
            return false;
        }
        if self.g.is_one() || self.g.modpow(&self.q, &self.p) != one {
            return false;
        }
        self.h.modpow(&self.q, &self.p) == one
    }
}
