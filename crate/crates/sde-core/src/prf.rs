//! The pseudorandom function mapping elements into exponents.

use hmac::{Hmac, Mac};
use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::Sha256;

/// Which PRF family instantiates f. The toy variant exists so test fixtures
/// can pin exponent values directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrfId {
    /// HMAC-SHA256 keyed with the master PRF key, output reduced mod q.
    HmacSha256,
    /// Reads the trailing decimal digits of the canonical element as the
    /// exponent. Test groups only.
    ToyDigits,
}

impl PrfId {
    /// sigma_e = f_s(e) mapped into Z*_q. A zero residue is re-derived with
    /// an appended counter byte so trapdoors never degenerate to g^0.
    pub fn sigma(&self, key: &[u8], canonical: &[u8], q: &BigUint) -> BigUint {
        match self {
            PrfId::HmacSha256 => {
                let mut input = canonical.to_vec();
                loop {
                    let mut mac = Hmac::<Sha256>::new_from_slice(key)
                        .expect("HMAC accepts any key length");
                    mac.update(&input);
                    let digest = mac.finalize().into_bytes();
                    let sigma = BigUint::from_bytes_be(&digest) % q;
                    if !sigma.is_zero() {
                        return sigma;
                    }
                    input.push(0x00);
                }
            }
            PrfId::ToyDigits => {
                let text = String::from_utf8_lossy(canonical);
                let digits: String = text
                    .chars()
                    .rev()
                    .take_while(|c| c.is_ascii_digit())
                    .collect::<Vec<_>>()
                    .into_iter()
                    .rev()
                    .collect();
                let raw = digits.parse::<u64>().unwrap_or_else(|_| {
                    canonical.iter().map(|&b| b as u64).sum::<u64>()
                });
                let sigma = BigUint::from(raw) % q;
                if sigma.is_zero() {
                    BigUint::from(1u32)
                } else {
                    sigma
                }
            }
        }
    }
}
