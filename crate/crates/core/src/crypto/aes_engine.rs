// Licensed under the Apache-2.0 license

//! AES-256-CBC accelerator model in automatic mode.
//!
//! Input and output are single 16-byte registers. A full input register
//! starts the cipher core as soon as the core is free; the core stalls when
//! a finished block cannot move into an unread output register.

use super::aes::{Aes256, BLOCK_BYTES, KEY_BYTES};
use super::CryptoError;
use crate::engine::SimTime;

/// Steady-state cycles per block, masked implementation.
pub const BLOCK_CYCLES: u64 = 72;
/// Extra cycles paid by the first block after configuration.
pub const START_OVERHEAD_CYCLES: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AesDirection {
    Encrypt,
    Decrypt,
}

#[derive(Clone, Debug)]
pub struct AesEngine {
    cipher: Option<(Aes256, AesDirection)>,
    chain: [u8; BLOCK_BYTES],
    input: Vec<u8>,
    in_flight: Option<[u8; BLOCK_BYTES]>,
    stalled: Option<[u8; BLOCK_BYTES]>,
    output: Option<[u8; BLOCK_BYTES]>,
    busy_until: SimTime,
    first_block: bool,
    blocks: u64,
}

impl Default for AesEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl AesEngine {
    pub fn new() -> Self {
        AesEngine {
            cipher: None,
            chain: [0; BLOCK_BYTES],
            input: Vec::with_capacity(BLOCK_BYTES),
            in_flight: None,
            stalled: None,
            output: None,
            busy_until: SimTime::ZERO,
            first_block: true,
            blocks: 0,
        }
    }

    pub fn configure(
        &mut self,
        key: &[u8; KEY_BYTES],
        iv: &[u8; BLOCK_BYTES],
        direction: AesDirection,
    ) -> Result<(), CryptoError> {
        if self.is_busy() {
            return Err(CryptoError::Busy);
        }
        *self = AesEngine {
            cipher: Some((Aes256::new(key), direction)),
            chain: *iv,
            ..AesEngine::new()
        };
        Ok(())
    }

    pub fn is_busy(&self) -> bool {
        self.in_flight.is_some() || self.stalled.is_some()
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    /// Status bit: the input register can take a new block.
    pub fn input_ready(&self) -> bool {
        self.input.is_empty()
    }

    pub fn output_valid(&self) -> bool {
        self.output.is_some()
    }

    /// CBC chaining value: the IV, then the last ciphertext block.
    pub fn chain(&self) -> [u8; BLOCK_BYTES] {
        self.chain
    }

    pub fn blocks_processed(&self) -> u64 {
        self.blocks
    }

    /// Write plaintext (or ciphertext when decrypting) into the input register.
    pub fn push(&mut self, now: SimTime, data: &[u8]) -> Result<Option<SimTime>, CryptoError> {
        if self.cipher.is_none() {
            return Err(CryptoError::NotConfigured);
        }
        if self.input.len() + data.len() > BLOCK_BYTES {
            return Err(CryptoError::BackPressure);
        }
        self.input.extend_from_slice(data);
        Ok(self.try_start(now))
    }

    pub fn process_block(&mut self, now: SimTime, block: &[u8; BLOCK_BYTES]) -> Result<Option<SimTime>, CryptoError> {
        if !self.input_ready() {
            return Err(CryptoError::BackPressure);
        }
        self.push(now, block)
    }

    pub fn on_block_done(&mut self, now: SimTime) -> Option<SimTime> {
        let result = self.in_flight.take().expect("block completion without block in flight");
        self.blocks += 1;
        if self.output.is_none() {
            self.output = Some(result);
            self.try_start(now)
        } else {
            self.stalled = Some(result);
            None
        }
    }

    /// Read the output register, releasing a stalled core if there is one.
    pub fn read_output(&mut self, now: SimTime) -> Result<([u8; BLOCK_BYTES], Option<SimTime>), CryptoError> {
        let out = self.output.take().ok_or(CryptoError::OutputEmpty)?;
        let next = match self.stalled.take() {
            Some(s) => {
                self.output = Some(s);
                self.try_start(now)
            }
            None => None,
        };
        Ok((out, next))
    }

    fn try_start(&mut self, now: SimTime) -> Option<SimTime> {
        if self.is_busy() || self.input.len() < BLOCK_BYTES {
            return None;
        }
        let (cipher, dir) = self.cipher.as_ref()?;
        let block: [u8; BLOCK_BYTES] = self.input.as_slice().try_into().expect("full block");
        self.input.clear();
        let result = match dir {
            AesDirection::Encrypt => {
                let mut x = block;
                x.iter_mut().zip(&self.chain).for_each(|(a, b)| *a ^= b);
                let ct = cipher.encrypt_block(&x);
                self.chain = ct;
                ct
            }
            AesDirection::Decrypt => {
                let mut pt = cipher.decrypt_block(&block);
                pt.iter_mut().zip(&self.chain).for_each(|(a, b)| *a ^= b);
                self.chain = block;
                pt
            }
        };
        self.in_flight = Some(result);
        let cost = BLOCK_CYCLES + if self.first_block { START_OVERHEAD_CYCLES } else { 0 };
        self.first_block = false;
        self.busy_until = now.after(cost);
        Some(self.busy_until)
    }
}

/// Untimed CBC over whole blocks.
pub fn cbc(
    key: &[u8; KEY_BYTES],
    iv: &[u8; BLOCK_BYTES],
    direction: AesDirection,
    data: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    if !data.len().is_multiple_of(BLOCK_BYTES) {
        return Err(CryptoError::PartialBlock(data.len()));
    }
    let mut e = AesEngine::new();
    e.configure(key, iv, direction)?;
    let mut out = Vec::with_capacity(data.len());
    for chunk in data.chunks_exact(BLOCK_BYTES) {
        let t = e.push(SimTime::ZERO, chunk)?.expect("idle core starts");
        e.on_block_done(t);
        out.extend_from_slice(&e.read_output(t)?.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nist() -> ([u8; 32], [u8; 16]) {
        let key = hex::decode("603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4").unwrap();
        let iv: [u8; 16] = core::array::from_fn(|i| i as u8);
        (key.try_into().unwrap(), iv)
    }

    #[test]
    fn sp800_38a_cbc_aes256() {
        let (key, iv) = nist();
        let pt = hex::decode(concat!(
            "6bc1bee22e409f96e93d7e117393172a",
            "ae2d8a571e03ac9c9eb76fac45af8e51",
            "30c81c46a35ce411e5fbc1191a0a52ef",
            "f69f2445df4f9b17ad2b417be66c3710"
        ))
        .unwrap();
        let ct = cbc(&key, &iv, AesDirection::Encrypt, &pt).unwrap();
        assert_eq!(
            hex::encode(&ct),
            concat!(
                "f58c4c04d6e5f1ba779eabfb5f7bfbd6",
                "9cfc4e967edb808d679f777bc6702c7d",
                "39f23369a9d9bacfa530e26304231461",
                "b2eb05e2c39be9fcda6c19078c6a9d1b"
            )
        );
        assert_eq!(cbc(&key, &iv, AesDirection::Decrypt, &ct).unwrap(), pt);
    }

    #[test]
    fn timing_and_chaining() {
        let (key, iv) = nist();
        let mut e = AesEngine::new();
        e.configure(&key, &iv, AesDirection::Encrypt).unwrap();
        let t0 = e.process_block(SimTime(0), &[1; 16]).unwrap().unwrap();
        assert_eq!(t0, SimTime(BLOCK_CYCLES + START_OVERHEAD_CYCLES));
        // next input accepted while the core works
        assert_eq!(e.process_block(SimTime(3), &[2; 16]).unwrap(), None);
        assert_eq!(e.process_block(SimTime(4), &[3; 16]), Err(CryptoError::BackPressure));
        let t1 = e.on_block_done(t0).unwrap();
        assert_eq!(t1, t0.after(BLOCK_CYCLES));
        let (c0, _) = e.read_output(t0).unwrap();
        assert_eq!(e.chain(), {
            let mut x = [2u8; 16];
            x.iter_mut().zip(&c0).for_each(|(a, b)| *a ^= b);
            Aes256::new(&key).encrypt_block(&x)
        });
        assert_eq!(BLOCK_CYCLES as f64 / 16.0, 4.5);
    }

    #[test]
    fn unread_output_stalls_the_core() {
        let (key, iv) = nist();
        let mut e = AesEngine::new();
        e.configure(&key, &iv, AesDirection::Encrypt).unwrap();
        let t0 = e.process_block(SimTime(0), &[1; 16]).unwrap().unwrap();
        e.process_block(SimTime(1), &[2; 16]).unwrap();
        let t1 = e.on_block_done(t0).unwrap();
        e.process_block(SimTime(80), &[3; 16]).unwrap();
        assert_eq!(e.on_block_done(t1), None);
        assert!(e.is_busy());
        // the stalled result moves into the output register, freeing the core
        let (_, next) = e.read_output(SimTime(200)).unwrap();
        assert_eq!(next, Some(SimTime(200 + BLOCK_CYCLES)));
        assert!(e.output_valid());
        let (_, next) = e.read_output(SimTime(201)).unwrap();
        assert_eq!(next, None);
    }

    #[test]
    fn configure_while_busy_fails() {
        let (key, iv) = nist();
        let mut e = AesEngine::new();
        e.configure(&key, &iv, AesDirection::Encrypt).unwrap();
        e.process_block(SimTime(0), &[0; 16]).unwrap();
        assert_eq!(e.configure(&key, &iv, AesDirection::Encrypt), Err(CryptoError::Busy));
    }
}
