//! Schnorr-group generation: a prime-order subgroup of Z*_p with q | p - 1.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::SdeError;

/// The arithmetic triple (p, q, g) describing the subgroup. `h` and the key
/// material live elsewhere; this is just the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescription {
    pub p: BigUint,
    pub q: BigUint,
    pub g: BigUint,
}

const SMALL_PRIMES: [u32; 46] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211,
];

fn divisible_by_small_prime(n: &BigUint) -> bool {
    SMALL_PRIMES
        .iter()
        .any(|&sp| (n % BigUint::from(sp)).is_zero() && *n != BigUint::from(sp))
}

/// Miller-Rabin with random bases. 40 rounds gives a failure bound far below
/// the group sizes used here.
pub fn is_probable_prime(n: &BigUint, rng: &mut impl Rng) -> bool {
    let two = BigUint::from(2u32);
    let three = BigUint::from(3u32);
    if *n < two {
        return false;
    }
    if *n == two || *n == three {
        return true;
    }
    if n.is_even() || divisible_by_small_prime(n) {
        return false;
    }
    let n_minus_one = n - BigUint::one();
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for _ in 0..40 {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn random_prime(bits: u64, rng: &mut impl Rng) -> BigUint {
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(0, true);
        if is_probable_prime(&candidate, rng) {
            return candidate;
        }
    }
}

/// Generates (p, q, g) with q prime of `q_bits`, p = kq + 1 prime of `p_bits`,
/// and g a generator of the order-q subgroup.
pub fn generate_group(
    p_bits: u32,
    q_bits: u32,
    rng: &mut impl Rng,
) -> Result<GroupDescription, SdeError> {
    let q = random_prime(q_bits as u64, rng);
    // Search p = kq + 1 around the requested width.
    let max_attempts = 40 * p_bits as usize;
    let k_bits = (p_bits - q_bits) as u64;
    for _ in 0..max_attempts {
        let mut k = rng.gen_biguint(k_bits);
        k.set_bit(k_bits - 1, true);
        if k.is_odd() {
            k += BigUint::one();
        }
        let p = &k * &q + BigUint::one();
        if p.bits() != p_bits as u64 || !is_probable_prime(&p, rng) {
            continue;
        }
        let g = find_generator(&p, &q, rng);
        return Ok(GroupDescription { p, q, g });
    }
    Err(SdeError::GenerationFailed(max_attempts))
}

fn find_generator(p: &BigUint, q: &BigUint, rng: &mut impl Rng) -> BigUint {
    let one = BigUint::one();
    let exponent = (p - &one) / q;
    loop {
        let a = rng.gen_biguint_range(&BigUint::from(2u32), &(p - &one));
        let g = a.modpow(&exponent, p);
        if !g.is_one() {
            return g;
        }
    }
}

/// Uniform draw from [1, q-1].
pub(crate) fn random_exponent(q: &BigUint, rng: &mut impl Rng) -> BigUint {
    rng.gen_biguint_range(&BigUint::one(), q)
}

/// (a - b) mod q, handling a < b.
pub(crate) fn sub_mod(a: &BigUint, b: &BigUint, q: &BigUint) -> BigUint {
    ((a + q) - (b % q)) % q
}

/// Inverse of a group element via Fermat: a^(p-2) mod p.
pub(crate) fn invert(a: &BigUint, p: &BigUint) -> BigUint {
    a.modpow(&(p - BigUint::from(2u32)), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn miller_rabin_classifies_small_numbers() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let primes = [2u32, 3, 5, 23, 101, 65537];
        let composites = [1u32, 4, 15, 21, 561, 65536];
        for p in primes {
            assert!(is_probable_prime(&BigUint::from(p), &mut rng), "{p}");
        }
        for c in composites {
            assert!(!is_probable_prime(&BigUint::from(c), &mut rng), "{c}");
        }
    }

    #[test]
    fn generated_group_has_correct_structure() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let desc = generate_group(64, 32, &mut rng).unwrap();
        assert!(((&desc.p - BigUint::one()) % &desc.q).is_zero());
        assert_eq!(desc.g.modpow(&desc.q, &desc.p), BigUint::one());
        assert!(!desc.g.is_one());
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = generate_group(64, 32, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let b = generate_group(64, 32, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
