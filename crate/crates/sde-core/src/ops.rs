//! The two-round encryption and trapdoor pipeline, and encrypted matching.
//!
//! Client round uses the user's exponent share x1; the server round applies
//! x2 so the result sits under the full master exponent x = x1 + x2 mod q.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::counters::bump;
use crate::element::Element;
use crate::error::SdeError;
use crate::group::{invert, random_exponent, sub_mod};
use crate::keys::{ClientKeySet, PublicParams, ServerKeySet};
use crate::serial::biguint_hex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientEncryptedElement {
    #[serde(with = "biguint_hex")]
    pub c1_hat: BigUint,
    #[serde(with = "biguint_hex")]
    pub c2_hat: BigUint,
    #[serde(with = "hex::serde")]
    pub c3_hat: Vec<u8>,
}

/// The canonical, user-independent ciphertext every store holds:
/// c1 = h^(r+sigma), c2 = H(h^r).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerEncryptedElement {
    #[serde(with = "biguint_hex")]
    pub c1: BigUint,
    #[serde(with = "hex::serde")]
    pub c2: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientTrapdoor {
    #[serde(with = "biguint_hex")]
    pub t1: BigUint,
    #[serde(with = "biguint_hex")]
    pub t2: BigUint,
}

/// g^(x * sigma_e): equal across users and across randomness draws for the
/// same element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerTrapdoor {
    #[serde(with = "biguint_hex")]
    pub t: BigUint,
}

fn sigma_of(e: &Element, key: &[u8], params: &PublicParams) -> Result<BigUint, SdeError> {
    if e.is_empty() {
        return Err(SdeError::EmptyElement);
    }
    Ok(params.prf_id.sigma(key, &e.canonical(), &params.q))
}

/// Client encryption round with caller-chosen randomness. Exposed so toy
/// fixtures can pin r_e; normal callers use [`client_enc`].
pub fn client_enc_with_randomness(
    e: &Element,
    k: &ClientKeySet,
    params: &PublicParams,
    r: &BigUint,
) -> Result<ClientEncryptedElement, SdeError> {
    let sigma = sigma_of(e, &k.s, params)?;
    let exp = (r + &sigma) % &params.q;
    let c1_hat = params.g.modpow(&exp, &params.p);
    let c2_hat = c1_hat.modpow(&k.x1, &params.p);
    let h_r = params.h.modpow(r, &params.p);
    let c3_hat = params.hash_id.digest(&h_r, &params.p);
    bump(|c| c.client_enc += 1);
    Ok(ClientEncryptedElement { c1_hat, c2_hat, c3_hat })
}

/// First encryption round: c1 = g^(r+sigma), c2 = c1^x1, c3 = H(h^r) with
/// fresh r per call.
pub fn client_enc(
    e: &Element,
    k: &ClientKeySet,
    params: &PublicParams,
    rng: &mut impl Rng,
) -> Result<ClientEncryptedElement, SdeError> {
    let r = random_exponent(&params.q, rng);
    client_enc_with_randomness(e, k, params, &r)
}

/// Second encryption round: c1 = c1_hat^x2 * c2_hat = h^(r+sigma).
/// Deterministic; c3 passes through unchanged.
pub fn server_reenc(c: &ClientEncryptedElement, sk: &ServerKeySet, params: &PublicParams) -> ServerEncryptedElement {
    let c1 = (c.c1_hat.modpow(&sk.x2, &params.p) * &c.c2_hat) % &params.p;
    bump(|ctr| ctr.server_reenc += 1);
    ServerEncryptedElement { c1, c2: c.c3_hat.clone() }
}

/// Client trapdoor round with caller-chosen randomness.
///
/// t1 = g^(sigma - r); t2 = h^r * g^(x1(sigma - r)). Computing t2 through h
/// keeps x2 off the client.
pub fn client_td_with_randomness(
    e: &Element,
    k: &ClientKeySet,
    params: &PublicParams,
    r: &BigUint,
) -> Result<ClientTrapdoor, SdeError> {
    let sigma = sigma_of(e, &k.s, params)?;
    let sigma_minus_r = sub_mod(&sigma, r, &params.q);
    let t1 = params.g.modpow(&sigma_minus_r, &params.p);
    let x1_exp = (&k.x1 * &sigma_minus_r) % &params.q;
    let t2 = (params.h.modpow(r, &params.p) * params.g.modpow(&x1_exp, &params.p)) % &params.p;
    bump(|c| c.client_td += 1);
    Ok(ClientTrapdoor { t1, t2 })
}

/// First trapdoor round with fresh randomness.
pub fn client_td(
    e: &Element,
    k: &ClientKeySet,
    params: &PublicParams,
    rng: &mut impl Rng,
) -> Result<ClientTrapdoor, SdeError> {
    let r = random_exponent(&params.q, rng);
    client_td_with_randomness(e, k, params, &r)
}

/// Second trapdoor round: t = t1^x2 * t2 = g^(x * sigma). The per-call
/// randomness cancels, so the output is stable across calls and users.
pub fn server_td(td: &ClientTrapdoor, sk: &ServerKeySet, params: &PublicParams) -> ServerTrapdoor {
    let t = (td.t1.modpow(&sk.x2, &params.p) * &td.t2) % &params.p;
    bump(|c| c.server_td += 1);
    ServerTrapdoor { t }
}

/// Encrypted equality test: true iff c2 = H(c1 * t^-1).
pub fn match_element(c: &ServerEncryptedElement, t: &ServerTrapdoor, params: &PublicParams) -> bool {
    let blinded = (&c.c1 * invert(&t.t, &params.p)) % &params.p;
    bump(|ctr| ctr.matches += 1);
    c.c2 == params.hash_id.digest(&blinded, &params.p)
}
