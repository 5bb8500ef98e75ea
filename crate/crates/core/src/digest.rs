//! Domain-tagged SHA-256 hashing used everywhere the protocol needs a
//! collision-resistant digest (RANDAO mixes, sampling seeds, Fiat-Shamir
//! challenges).

use sha2::{Digest as _, Sha256};

pub const DIGEST_LEN: usize = 32;

/// 256-bit digest value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Digest(#[serde(with = "hex_bytes")] pub [u8; DIGEST_LEN]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn xor(&self, other: &Digest) -> Digest {
        let mut out = [0u8; DIGEST_LEN];
        for (i, b) in out.iter_mut().enumerate() {
            *b = self.0[i] ^ other.0[i];
        }
        Digest(out)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// First eight bytes interpreted as a big-endian word; used when a
    /// digest seeds an integer draw.
    pub fn to_u64(&self) -> u64 {
        u64::from_be_bytes(self.0[..8].try_into().unwrap())
    }
}

impl std::fmt::Debug for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

/// Hashes `data` under a one-byte-length-prefixed domain tag, so digests
/// from different subsystems can never collide by concatenation tricks.
pub fn hash_tagged(tag: &str, data: &[u8]) -> Digest {
    debug_assert!(tag.len() <= u8::MAX as usize);
    let mut h = Sha256::new();
    h.update([tag.len() as u8]);
    h.update(tag.as_bytes());
    h.update(data);
    Digest(h.finalize().into())
}

/// Variant of [`hash_tagged`] over several input parts.
pub fn hash_tagged_parts(tag: &str, parts: &[&[u8]]) -> Digest {
    debug_assert!(tag.len() <= u8::MAX as usize);
    let mut h = Sha256::new();
    h.update([tag.len() as u8]);
    h.update(tag.as_bytes());
    for p in parts {
        h.update(p);
    }
    Digest(h.finalize().into())
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let raw = hex::decode(&text).map_err(serde::de::Error::custom)?;
        raw.try_into()
            .map_err(|_| serde::de::Error::custom("expected 32 hex-encoded bytes"))
    }
}
