// Licensed under the Apache-2.0 license

//! Functional and cycle-timed models of the HMAC/SHA-256 and AES-256-CBC
//! accelerators.

pub mod aes;
pub mod aes_engine;
pub mod hmac_engine;
pub mod sha256;

use std::fmt;

pub use aes_engine::{AesDirection, AesEngine};
pub use hmac_engine::{DigestOrder, HashMode, HmacEngine};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error("engine busy")]
    Busy,
    #[error("input FIFO full; poll status before pushing")]
    BackPressure,
    #[error("key supplied in SHA-256 mode")]
    UnexpectedKey,
    #[error("HMAC mode requires a key")]
    MissingKey,
    #[error("engine not configured")]
    NotConfigured,
    #[error("digest already finalized")]
    AlreadyFinalized,
    #[error("digest not available before finalization completes")]
    NotFinalized,
    #[error("output register empty")]
    OutputEmpty,
    #[error("AES-CBC needs whole 16-byte blocks, got {0} bytes")]
    PartialBlock(usize),
}

pub fn sha256(msg: &[u8]) -> Digest {
    hmac_engine::oneshot(HashMode::Sha256, None, msg)
        .expect("fresh engine accepts any message")
        .0
}

pub fn hmac_sha256(key: &[u8; 32], msg: &[u8]) -> Digest {
    hmac_engine::oneshot(HashMode::Hmac, Some(key), msg)
        .expect("fresh engine accepts any message")
        .0
}

pub fn aes256_cbc_encrypt(key: &[u8; 32], iv: &[u8; 16], data: &[u8]) -> Result<Vec<u8>, CryptoError> {
    aes_engine::cbc(key, iv, AesDirection::Encrypt, data)
}

pub fn aes256_cbc_decrypt(key: &[u8; 32], iv: &[u8; 16], data: &[u8]) -> Result<Vec<u8>, CryptoError> {
    aes_engine::cbc(key, iv, AesDirection::Decrypt, data)
}
