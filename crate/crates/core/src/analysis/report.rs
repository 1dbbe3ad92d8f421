//! Serialization helpers: complex numbers travel as `[re, im]` pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::C64;

pub fn ser_c64<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn ser_c64_vec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

pub fn de_c64_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
    let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
    Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
}

/// Formats a float for CSV output with full round-trip precision.
pub fn csv_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}
