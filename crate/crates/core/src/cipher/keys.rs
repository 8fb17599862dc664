//! Plaintext-keyed derivation of the chaotic control parameters and
//! initial values from a SHA-256 hash.

use sha2::{Digest, Sha256};

use crate::chaos::{SystemParams, SystemState};
use crate::cipher::{CipherError, ImageBuffer};

/// All key material of one encryption: the 256-bit hash, the 18 auxiliary
/// 16-bit words, the six aggregated words with their normalized values,
/// and the derived map parameters and initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMaterial {
    hash: [u8; 32],
    t: [u16; 18],
    k: [u16; 6],
    k_norm: [f64; 6],
    alpha: f64,
    r: f64,
    mu: f64,
    x0: f64,
    y0: f64,
    z0: f64,
}

impl KeyMaterial {
    /// Derives keys from the plaintext: SHA-256 over the raw interleaved
    /// RGB sample bytes in row-major order.
    pub fn derive(plaintext: &ImageBuffer) -> Self {
        let digest = Sha256::digest(plaintext.samples());
        Self::from_hash(digest.into())
    }

    /// Raw-key entry point: builds the material directly from a 256-bit
    /// hash, bypassing plaintext hashing (used for key-sensitivity
    /// experiments with explicit keys).
    pub fn from_hash(hash: [u8; 32]) -> Self {
        // t1..t16 are the big-endian values of the 16 consecutive 16-bit
        // hash segments; t17 and t18 fold the leading words bitwise.
        let mut t = [0u16; 18];
        for j in 0..16 {
            t[j] = u16::from_be_bytes([hash[2 * j], hash[2 * j + 1]]);
        }
        t[16] = (t[0] & t[1]) ^ t[2];
        t[17] = (t[3] & t[4]) ^ t[5];
        let mut k = [0u16; 6];
        let mut k_norm = [0.0f64; 6];
        for i in 0..6 {
            let sum = t[3 * i] as u32 + t[3 * i + 1] as u32 + t[3 * i + 2] as u32;
            k[i] = (sum % (1 << 16)) as u16;
            k_norm[i] = k[i] as f64 / 65536.0;
        }
        Self {
            hash,
            t,
            k,
            k_norm,
            alpha: 3.0 + 3.0 * k_norm[0],
            r: 3.7 + 0.3 * k_norm[1],
            mu: 5.0 + 5.0 * k_norm[2],
            x0: k_norm[3],
            y0: k_norm[4],
            z0: k_norm[5],
        }
    }

    /// Parses a 64-hex-character key, ignoring ASCII whitespace,
    /// case-insensitive.
    pub fn from_hex(text: &str) -> Result<Self, CipherError> {
        let cleaned: String = text.chars().filter(|c| !c.is_ascii_whitespace()).collect();
        if cleaned.len() != 64 {
            return Err(CipherError::MalformedKey {
                reason: format!("expected 64 hex characters, got {}", cleaned.len()),
            });
        }
        let mut hash = [0u8; 32];
        for (i, byte) in hash.iter_mut().enumerate() {
            let pair = &cleaned[2 * i..2 * i + 2];
            *byte = u8::from_str_radix(pair, 16).map_err(|_| CipherError::MalformedKey {
                reason: format!("invalid hex at position {}: {pair:?}", 2 * i),
            })?;
        }
        Ok(Self::from_hash(hash))
    }

    pub fn hash(&self) -> &[u8; 32] {
        &self.hash
    }

    pub fn hash_hex(&self) -> String {
        self.hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn t_words(&self) -> &[u16; 18] {
        &self.t
    }

    pub fn k_words(&self) -> &[u16; 6] {
        &self.k
    }

    pub fn k_norm(&self) -> &[f64; 6] {
        &self.k_norm
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Derived map parameters with the fixed coupling coefficient. The
    /// affine ranges alpha in [3,6), r in [3.7,4), mu in [5,10) always
    /// satisfy the parameter invariants.
    pub fn params(&self) -> SystemParams {
        SystemParams::new(self.alpha, self.r, self.mu)
            .expect("derived parameter ranges are valid by construction")
    }

    /// Derived initial state; coordinates in [0, 1) and sat-clamped by the
    /// orbit generator before the first iteration.
    pub fn seed(&self) -> SystemState {
        SystemState::new(self.x0, self.y0, self.z0)
    }
}

/// Derives key material from the plaintext image (hash of the raw
/// samples).
pub fn derive_keys(plaintext: &ImageBuffer) -> KeyMaterial {
    KeyMaterial::derive(plaintext)
}
