// Licensed under the Apache-2.0 license

//! HMAC/SHA-256 accelerator model.
//!
//! Software pushes message bytes into a one-block (64-byte) FIFO. A full
//! block moves into the compressor as soon as it is free; each compression
//! takes [`COMPRESS_CYCLES`]. The FIFO refills while the compressor runs,
//! so a push is only refused when the FIFO still holds a whole block.

use std::collections::VecDeque;

use super::sha256::{self, BLOCK_BYTES, INITIAL_STATE};
use super::{CryptoError, Digest};
use crate::engine::SimTime;

pub const COMPRESS_CYCLES: u64 = 80;
pub const KEY_BYTES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashMode {
    Sha256,
    Hmac,
}

/// Byte order of the digest as read back from the digest registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DigestOrder {
    /// Standard SHA-256 byte string.
    #[default]
    Big,
    /// Each 32-bit digest word little-endian.
    Little,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Idle,
    Absorbing,
    Finalizing,
    Outer,
    Done,
}

#[derive(Clone, Debug)]
pub struct HmacEngine {
    mode: HashMode,
    order: DigestOrder,
    key: Option<[u8; KEY_BYTES]>,
    state: [u32; 8],
    fifo: Vec<u8>,
    internal: VecDeque<[u8; BLOCK_BYTES]>,
    in_flight: Option<[u8; BLOCK_BYTES]>,
    busy_until: SimTime,
    msg_bytes: u64,
    stage: Stage,
    compressions: u64,
    digest: Option<Digest>,
}

impl Default for HmacEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl HmacEngine {
    pub fn new() -> Self {
        HmacEngine {
            mode: HashMode::Sha256,
            order: DigestOrder::Big,
            key: None,
            state: INITIAL_STATE,
            fifo: Vec::with_capacity(BLOCK_BYTES),
            internal: VecDeque::new(),
            in_flight: None,
            busy_until: SimTime::ZERO,
            msg_bytes: 0,
            stage: Stage::Idle,
            compressions: 0,
            digest: None,
        }
    }

    pub fn is_busy(&self) -> bool {
        self.in_flight.is_some() || !self.internal.is_empty()
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    pub fn chaining_state(&self) -> [u32; 8] {
        self.state
    }

    pub fn compressions(&self) -> u64 {
        self.compressions
    }

    /// Message bits accepted so far.
    pub fn msg_len_bits(&self) -> u64 {
        self.msg_bytes * 8
    }

    /// FIFO status bit: true when a write of a full block would be accepted.
    pub fn fifo_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    pub fn fifo_room(&self) -> usize {
        BLOCK_BYTES - self.fifo.len()
    }

    pub fn is_done(&self) -> bool {
        self.stage == Stage::Done
    }

    /// Returns the completion time of a compression started by this call.
    pub fn configure(
        &mut self,
        now: SimTime,
        mode: HashMode,
        order: DigestOrder,
        key: Option<&[u8; KEY_BYTES]>,
    ) -> Result<Option<SimTime>, CryptoError> {
        if self.is_busy() {
            return Err(CryptoError::Busy);
        }
        match (mode, key) {
            (HashMode::Sha256, Some(_)) => return Err(CryptoError::UnexpectedKey),
            (HashMode::Hmac, None) => return Err(CryptoError::MissingKey),
            _ => {}
        }
        *self = HmacEngine {
            mode,
            order,
            key: key.copied(),
            stage: Stage::Absorbing,
            ..HmacEngine::new()
        };
        if let Some(k) = key {
            self.internal.push_back(pad_key(k, 0x36));
        }
        Ok(self.start_next(now))
    }

    /// Write message bytes into the FIFO.
    pub fn push(&mut self, now: SimTime, data: &[u8]) -> Result<Option<SimTime>, CryptoError> {
        match self.stage {
            Stage::Absorbing => {}
            Stage::Idle => return Err(CryptoError::NotConfigured),
            _ => return Err(CryptoError::AlreadyFinalized),
        }
        if data.len() > self.fifo_room() {
            return Err(CryptoError::BackPressure);
        }
        self.fifo.extend_from_slice(data);
        self.msg_bytes += data.len() as u64;
        Ok(self.start_next(now))
    }

    pub fn push_block(&mut self, now: SimTime, block: &[u8; BLOCK_BYTES]) -> Result<Option<SimTime>, CryptoError> {
        self.push(now, block)
    }

    /// Issue the process command: pad the message and run the remaining
    /// compressions (including the outer pass in HMAC mode).
    pub fn finalize(&mut self, now: SimTime) -> Result<Option<SimTime>, CryptoError> {
        match self.stage {
            Stage::Absorbing => {}
            Stage::Idle => return Err(CryptoError::NotConfigured),
            _ => return Err(CryptoError::AlreadyFinalized),
        }
        let mut tail = std::mem::take(&mut self.fifo);
        if tail.len() == BLOCK_BYTES {
            self.internal.push_back(tail.as_slice().try_into().expect("full block"));
            tail.clear();
        }
        let total = self.msg_bytes
            + if self.mode == HashMode::Hmac {
                BLOCK_BYTES as u64
            } else {
                0
            };
        self.internal.extend(sha256::padding_blocks(&tail, total));
        self.stage = Stage::Finalizing;
        Ok(self.start_next(now))
    }

    /// Compressor completion event. Returns the next completion time if
    /// another block starts immediately.
    pub fn on_compress_done(&mut self, now: SimTime) -> Option<SimTime> {
        let block = self
            .in_flight
            .take()
            .expect("compression completion without block in flight");
        sha256::compress(&mut self.state, &block);
        self.compressions += 1;
        if self.stage == Stage::Finalizing && !self.is_busy() {
            let inner = sha256::state_to_bytes(&self.state);
            match (self.mode, self.key) {
                (HashMode::Hmac, Some(key)) => {
                    self.state = INITIAL_STATE;
                    self.internal.push_back(pad_key(&key, 0x5c));
                    self.internal
                        .extend(sha256::padding_blocks(&inner, (BLOCK_BYTES + inner.len()) as u64));
                    self.stage = Stage::Outer;
                }
                _ => self.finish(inner),
            }
        } else if self.stage == Stage::Outer && !self.is_busy() {
            self.finish(sha256::state_to_bytes(&self.state));
        }
        self.start_next(now)
    }

    /// Digest registers, valid once the engine reports done.
    pub fn read_digest(&self) -> Result<Digest, CryptoError> {
        self.digest.ok_or(CryptoError::NotFinalized)
    }

    fn finish(&mut self, bytes: [u8; 32]) {
        let bytes = match self.order {
            DigestOrder::Big => bytes,
            DigestOrder::Little => {
                let mut b = bytes;
                b.chunks_exact_mut(4).for_each(|w| w.reverse());
                b
            }
        };
        self.digest = Some(Digest(bytes));
        self.stage = Stage::Done;
    }

    fn start_next(&mut self, now: SimTime) -> Option<SimTime> {
        if self.in_flight.is_some() {
            return None;
        }
        let next = self.internal.pop_front().or_else(|| {
            (self.stage == Stage::Absorbing && self.fifo.len() == BLOCK_BYTES).then(|| {
                let b: [u8; BLOCK_BYTES] = self.fifo.as_slice().try_into().expect("full block");
                self.fifo.clear();
                b
            })
        })?;
        self.in_flight = Some(next);
        self.busy_until = now.after(COMPRESS_CYCLES);
        Some(self.busy_until)
    }
}

fn pad_key(key: &[u8; KEY_BYTES], pad: u8) -> [u8; BLOCK_BYTES] {
    let mut block = [pad; BLOCK_BYTES];
    for (b, k) in block.iter_mut().zip(key) {
        *b ^= k;
    }
    block
}

/// Runs the engine to completion with no external clock: each compression
/// completes immediately after it starts.
pub fn oneshot(mode: HashMode, key: Option<&[u8; KEY_BYTES]>, msg: &[u8]) -> Result<(Digest, u64), CryptoError> {
    let mut e = HmacEngine::new();
    let mut now = SimTime::ZERO;
    let mut pending = e.configure(now, mode, DigestOrder::Big, key)?;
    let drain = |e: &mut HmacEngine, pending: &mut Option<SimTime>, now: &mut SimTime| {
        while let Some(t) = pending.take() {
            *now = t;
            *pending = e.on_compress_done(t);
        }
    };
    for chunk in msg.chunks(BLOCK_BYTES) {
        while e.fifo_room() < chunk.len() {
            drain(&mut e, &mut pending, &mut now);
        }
        if let Some(t) = e.push(now, chunk)? {
            pending = Some(t);
        }
    }
    if let Some(t) = e.finalize(now)? {
        pending = Some(t);
    }
    drain(&mut e, &mut pending, &mut now);
    Ok((e.read_digest()?, e.compressions()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drive(e: &mut HmacEngine, mut pending: Option<SimTime>) -> SimTime {
        let mut last = SimTime::ZERO;
        while let Some(t) = pending {
            last = t;
            pending = e.on_compress_done(t);
        }
        last
    }

    #[test]
    fn configure_loads_initial_state() {
        let mut e = HmacEngine::new();
        e.configure(SimTime::ZERO, HashMode::Sha256, DigestOrder::Little, None)
            .unwrap();
        assert_eq!(e.chaining_state(), INITIAL_STATE);
        assert_eq!(INITIAL_STATE[0], 0x6a09e667);
        assert_eq!(INITIAL_STATE[7], 0x5be0cd19);
    }

    #[test]
    fn key_rules() {
        let mut e = HmacEngine::new();
        assert_eq!(
            e.configure(SimTime::ZERO, HashMode::Sha256, DigestOrder::Big, Some(&[0; 32])),
            Err(CryptoError::UnexpectedKey)
        );
        assert_eq!(
            e.configure(SimTime::ZERO, HashMode::Hmac, DigestOrder::Big, None),
            Err(CryptoError::MissingKey)
        );
    }

    #[test]
    fn configure_while_busy_fails() {
        let mut e = HmacEngine::new();
        e.configure(SimTime::ZERO, HashMode::Sha256, DigestOrder::Big, None)
            .unwrap();
        let done = e.push_block(SimTime(0), &[0; 64]).unwrap();
        assert!(done.is_some());
        assert_eq!(
            e.configure(SimTime(1), HashMode::Sha256, DigestOrder::Big, None),
            Err(CryptoError::Busy)
        );
    }

    #[test]
    fn one_block_is_busy_for_80_cycles() {
        let mut e = HmacEngine::new();
        e.configure(SimTime(10), HashMode::Sha256, DigestOrder::Big, None)
            .unwrap();
        assert_eq!(e.push_block(SimTime(10), &[1; 64]).unwrap(), Some(SimTime(90)));
        assert_eq!(e.busy_until(), SimTime(90));
        assert!(e.is_busy());
        assert_eq!(e.on_compress_done(SimTime(90)), None);
        assert!(!e.is_busy());
        assert_eq!(64.0 / COMPRESS_CYCLES as f64, 0.8);
        assert_eq!(COMPRESS_CYCLES as f64 / 64.0, 1.25);
    }

    #[test]
    fn fifo_refills_while_compressing_and_back_pressures_when_full() {
        let mut e = HmacEngine::new();
        e.configure(SimTime(0), HashMode::Sha256, DigestOrder::Big, None)
            .unwrap();
        e.push_block(SimTime(0), &[1; 64]).unwrap();
        // second block waits in the FIFO
        assert_eq!(e.push_block(SimTime(5), &[2; 64]).unwrap(), None);
        assert!(!e.fifo_empty());
        assert_eq!(e.push(SimTime(6), &[3; 4]), Err(CryptoError::BackPressure));
        // compressor picks it up on completion
        assert_eq!(e.on_compress_done(SimTime(80)), Some(SimTime(160)));
        assert!(e.fifo_empty());
    }

    #[test]
    fn finalize_rules() {
        let mut e = HmacEngine::new();
        assert_eq!(e.finalize(SimTime(0)), Err(CryptoError::NotConfigured));
        e.configure(SimTime(0), HashMode::Sha256, DigestOrder::Big, None)
            .unwrap();
        let p = e.finalize(SimTime(0)).unwrap();
        drive(&mut e, p);
        assert_eq!(
            hex::encode(e.read_digest().unwrap().0),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(e.finalize(SimTime(200)), Err(CryptoError::AlreadyFinalized));
        assert_eq!(e.push(SimTime(200), &[0]), Err(CryptoError::AlreadyFinalized));
    }

    #[test]
    fn abc() {
        let (d, n) = oneshot(HashMode::Sha256, None, b"abc").unwrap();
        assert_eq!(
            hex::encode(d.0),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(n, 1);
    }

    #[test]
    fn hmac_costs_two_more_compressions() {
        for len in [0usize, 1, 55, 56, 64, 100, 1000] {
            let msg = vec![0x5a; len];
            let (_, sha) = oneshot(HashMode::Sha256, None, &msg).unwrap();
            let (_, hmac) = oneshot(HashMode::Hmac, Some(&[7; 32]), &msg).unwrap();
            assert_eq!(sha, sha256::block_count(len as u64));
            assert!(hmac >= sha + 2, "len {len}: {hmac} vs {sha}");
        }
    }

    #[test]
    fn little_order_swaps_words() {
        let mut e = HmacEngine::new();
        e.configure(SimTime(0), HashMode::Sha256, DigestOrder::Little, None)
            .unwrap();
        let p = e.finalize(SimTime(0)).unwrap();
        drive(&mut e, p);
        assert_eq!(&e.read_digest().unwrap().0[..4], &[0x42, 0xc4, 0xb0, 0xe3]);
    }
}
