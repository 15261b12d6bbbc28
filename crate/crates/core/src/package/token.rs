use sha2::{Digest, Sha256};

/// Deterministic 32-hex-character tokens derived from a seed and the
/// identifiers of the record they name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenGen {
    seed: u64,
}

impl TokenGen {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn token(&self, kind: &str, parts: &[&str]) -> String {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(kind.as_bytes());
        for p in parts {
            h.update([0u8]);
            h.update(p.as_bytes());
        }
        let digest = h.finalize();
        hex::encode(&digest[..16])
    }
}

pub fn is_valid_token(token: &str) -> bool {
    token.len() == 32
        && token
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}
