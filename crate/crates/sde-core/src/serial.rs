//! Serde helpers for the wire/store encodings: big integers as lowercase
//! big-endian hex without leading zeros, digests as lowercase hex.

pub mod biguint_hex {
    use num_bigint::BigUint;
    use num_traits::Num;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&value.to_str_radix(16))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(de)?;
        if s.is_empty() || s.chars().any(|c| !c.is_ascii_hexdigit() || c.is_ascii_uppercase()) {
            return Err(de::Error::custom(format!("malformed hex integer: {s:?}")));
        }
        if s.len() > 1 && s.starts_with('0') {
            return Err(de::Error::custom("hex integer has leading zeros"));
        }
        BigUint::from_str_radix(&s, 16).map_err(de::Error::custom)
    }
}
