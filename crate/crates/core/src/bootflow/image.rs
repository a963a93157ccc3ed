// Licensed under the Apache-2.0 license

//! Flash image format.
//!
//! ```text
//! "OTFL" | version u32 | entry_point u64 | body_length u64 |
//! body_digest [32] | signature [32] | body
//! ```
//!
//! All integers little-endian. `body_digest` is SHA-256 of the body and
//! `signature` is HMAC-SHA256 under the creator key over the first 56
//! header bytes (everything before the signature).

use serde::{Deserialize, Serialize};

use crate::crypto::{hmac_sha256, sha256};

pub const MAGIC: [u8; 4] = *b"OTFL";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 88;
pub const SIGNED_BYTES: usize = 56;
/// Whole image must fit the emulated flash data partitions.
pub const MAX_IMAGE_BYTES: usize = 64 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub entry_point: u64,
    pub body_length: u64,
    pub body_digest: [u8; 32],
    pub signature: [u8; 32],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlashImage {
    pub manifest: Manifest,
    pub body: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImageError {
    #[error("image shorter than the {HEADER_BYTES}-byte header ({0} bytes)")]
    Truncated(usize),
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported image version {0}")]
    Version(u32),
    #[error("declared body length {declared} but {actual} bytes follow the header")]
    LengthMismatch { declared: u64, actual: usize },
    #[error("image of {0} bytes exceeds the {MAX_IMAGE_BYTES}-byte flash")]
    TooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifestStatus {
    Ok,
    BadDigest,
    BadSignature,
}

impl Manifest {
    fn signed_prefix(&self) -> [u8; SIGNED_BYTES] {
        let mut out = [0u8; SIGNED_BYTES];
        out[..4].copy_from_slice(&MAGIC);
        out[4..8].copy_from_slice(&self.version.to_le_bytes());
        out[8..16].copy_from_slice(&self.entry_point.to_le_bytes());
        out[16..24].copy_from_slice(&self.body_length.to_le_bytes());
        out[24..56].copy_from_slice(&self.body_digest);
        out
    }
}

impl FlashImage {
    pub fn pack(entry_point: u64, body: &[u8], key: &[u8; 32]) -> Result<FlashImage, ImageError> {
        if HEADER_BYTES + body.len() > MAX_IMAGE_BYTES {
            return Err(ImageError::TooLarge(HEADER_BYTES + body.len()));
        }
        let mut manifest = Manifest {
            version: VERSION,
            entry_point,
            body_length: body.len() as u64,
            body_digest: sha256(body).0,
            signature: [0; 32],
        };
        manifest.signature = hmac_sha256(key, &manifest.signed_prefix()).0;
        Ok(FlashImage {
            manifest,
            body: body.to_vec(),
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + self.body.len());
        out.extend_from_slice(&self.manifest.signed_prefix());
        out.extend_from_slice(&self.manifest.signature);
        out.extend_from_slice(&self.body);
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<FlashImage, ImageError> {
        if bytes.len() < HEADER_BYTES {
            return Err(ImageError::Truncated(bytes.len()));
        }
        if bytes.len() > MAX_IMAGE_BYTES {
            return Err(ImageError::TooLarge(bytes.len()));
        }
        if bytes[..4] != MAGIC {
            return Err(ImageError::BadMagic);
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let version = u32_at(4);
        if version != VERSION {
            return Err(ImageError::Version(version));
        }
        let body = &bytes[HEADER_BYTES..];
        let body_length = u64_at(16);
        if body_length != body.len() as u64 {
            return Err(ImageError::LengthMismatch {
                declared: body_length,
                actual: body.len(),
            });
        }
        Ok(FlashImage {
            manifest: Manifest {
                version,
                entry_point: u64_at(8),
                body_length,
                body_digest: bytes[24..56].try_into().expect("32 bytes"),
                signature: bytes[56..88].try_into().expect("32 bytes"),
            },
            body: body.to_vec(),
        })
    }

    /// Size of the serialized image.
    pub fn len(&self) -> usize {
        HEADER_BYTES + self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn verify_manifest(image: &FlashImage, creator_key: &[u8; 32]) -> ManifestStatus {
    let m = &image.manifest;
    if m.body_length != image.body.len() as u64 || sha256(&image.body).0 != m.body_digest {
        return ManifestStatus::BadDigest;
    }
    if hmac_sha256(creator_key, &m.signed_prefix()).0 != m.signature {
        return ManifestStatus::BadSignature;
    }
    ManifestStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEY: [u8; 32] = [0x42; 32];

    #[test]
    fn pack_parse_verify() {
        let img = FlashImage::pack(0x8000_0000, b"rom_ext body", &KEY).unwrap();
        let bytes = img.to_bytes();
        assert_eq!(&bytes[..4], b"OTFL");
        assert_eq!(bytes.len(), HEADER_BYTES + 12);
        let back = FlashImage::parse(&bytes).unwrap();
        assert_eq!(back, img);
        assert_eq!(verify_manifest(&back, &KEY), ManifestStatus::Ok);
        assert_eq!(
            FlashImage::pack(0x8000_0000, b"rom_ext body", &KEY).unwrap().to_bytes(),
            bytes
        );
    }

    #[test]
    fn tampering_is_detected() {
        let img = FlashImage::pack(0x8000_0000, &[7; 100], &KEY).unwrap();
        let mut t = img.clone();
        t.body[50] ^= 1;
        assert_eq!(verify_manifest(&t, &KEY), ManifestStatus::BadDigest);
        let resigned = FlashImage::pack(0x8000_0000, &[7; 100], &[0x43; 32]).unwrap();
        assert_eq!(verify_manifest(&resigned, &KEY), ManifestStatus::BadSignature);
        let mut t = img.clone();
        t.manifest.entry_point += 4;
        assert_eq!(verify_manifest(&t, &KEY), ManifestStatus::BadSignature);
    }

    #[test]
    fn format_errors() {
        let bytes = FlashImage::pack(0, &[1; 8], &KEY).unwrap().to_bytes();
        assert_eq!(FlashImage::parse(&bytes[..40]), Err(ImageError::Truncated(40)));
        let mut b = bytes.clone();
        b[0] = b'X';
        assert_eq!(FlashImage::parse(&b), Err(ImageError::BadMagic));
        assert!(matches!(
            FlashImage::parse(&bytes[..bytes.len() - 1]),
            Err(ImageError::LengthMismatch { .. })
        ));
        assert!(matches!(
            FlashImage::pack(0, &vec![0; MAX_IMAGE_BYTES], &KEY),
            Err(ImageError::TooLarge(_))
        ));
    }
}
