//! Content hashes used to key cached artifacts.

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON form of `value` (object keys sorted).
pub fn hash_json<T: Serialize>(value: &T) -> String {
    sha256_hex(canonical_json(value).as_bytes())
}

/// Compact JSON with object keys in sorted order.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json::Map is a BTreeMap without the preserve_order feature
    let v = serde_json::to_value(value).expect("serializable value");
    serde_json::to_string(&v).expect("JSON value")
}

/// Pretty JSON with object keys in sorted order and a trailing newline.
pub fn pretty_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable value");
    let mut s = serde_json::to_string_pretty(&v).expect("JSON value");
    s.push('\n');
    s
}
