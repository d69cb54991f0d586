//! Serde helpers writing big integers as decimal strings.

use num_bigint::BigUint;
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(value: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_str(value)
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
    let s = String::deserialize(de)?;
    parse(&s).map_err(D::Error::custom)
}

pub fn parse(s: &str) -> Result<BigUint, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("not a decimal count: {s:?}"));
    }
    s.parse::<BigUint>().map_err(|e| e.to_string())
}
