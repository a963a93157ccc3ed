// Licensed under the Apache-2.0 license

//! The phase-labeled driver programs the secure-element core runs for each
//! workload. Every cycle the core spends is charged to exactly one label.

use super::calibration::AlgorithmCalibration;
use super::PhaseLabel;
use crate::crypto::aes::BLOCK_BYTES as AES_BLOCK;
use crate::crypto::sha256::BLOCK_BYTES as SHA_BLOCK;
use crate::crypto::{AesDirection, Digest, DigestOrder, HashMode};
use crate::dma::DmaStatus;
use crate::soc::{Activity, Event, Soc};
use crate::SimError;

const DIGEST_BYTES: u64 = 32;
/// Registers written to program one DMA transfer: src, dst, length, trigger.
const DMA_PROGRAM_WRITES: u64 = 4;
/// HMAC configure: mode/endianness, eight key words, start command.
const HMAC_CONFIG_WRITES: u64 = 10;
/// SHA-256 configure: mode/endianness, start command.
const SHA_CONFIG_WRITES: u64 = 2;
/// AES configure: control, two 8-word key shares, four IV words.
const AES_CONFIG_WRITES: u64 = 21;

/// Where the payload lives and how the core reaches it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataPath {
    /// Core loads and stores the payload in place.
    Direct { src: u64, dst: u64 },
    /// DMA stages the payload into TCDM in chunks of at most `chunk` bytes.
    Staged {
        src: u64,
        dst: u64,
        scratch: u64,
        chunk: u64,
    },
}

impl DataPath {
    /// Staged path through the whole TCDM, keeping room for one digest.
    pub fn staged(soc: &Soc, src: u64, dst: u64) -> DataPath {
        let tcdm = soc.mem.map().tcdm;
        let chunk = (tcdm.size - SHA_BLOCK as u64) / SHA_BLOCK as u64 * SHA_BLOCK as u64;
        DataPath::Staged {
            src,
            dst,
            scratch: tcdm.base,
            chunk,
        }
    }
}

fn ph(label: PhaseLabel) -> Activity {
    Activity::Phase(label)
}

/// Split `n` bytes into core access widths.
fn widths(n: u64) -> impl Iterator<Item = u8> {
    let words = n / 4;
    let rest = n % 4;
    std::iter::repeat_n(4u8, words as usize)
        .chain((rest >= 2).then_some(2))
        .chain((rest % 2 == 1).then_some(1))
}

fn dma_transfer(soc: &mut Soc, src: u64, dst: u64, len: u64, extra: u64) -> Result<(), SimError> {
    for _ in 0..DMA_PROGRAM_WRITES {
        soc.reg_access(ph(PhaseLabel::Dma))?;
    }
    soc.dma.set_extra_latency(extra);
    soc.dma.program(&soc.mem, src, dst, len)?;
    let done = soc.dma.start(soc.now())?;
    soc.sched.schedule_at(done, Event::DmaDone);
    soc.poll(ph(PhaseLabel::DmaWait), |s| s.dma.status() != DmaStatus::Busy)?;
    if soc.dma.status() == DmaStatus::Error {
        return Err(SimError::Deadlock("DMA transfer ended in error"));
    }
    Ok(())
}

/// Chunks `(source offset, core address, length)` of a payload.
fn chunks(path: DataPath, len: u64) -> Vec<(u64, u64, u64)> {
    match path {
        DataPath::Direct { src, .. } => vec![(0, src, len)],
        DataPath::Staged { scratch, chunk, .. } => {
            let mut out = Vec::new();
            let mut off = 0;
            while off < len {
                let n = chunk.min(len - off);
                out.push((off, scratch, n));
                off += n;
            }
            out
        }
    }
}

/// Hash `len` bytes with the HMAC/SHA-256 accelerator and write the 32-byte
/// result to the destination.
pub fn hash(
    soc: &mut Soc,
    mode: HashMode,
    key: Option<&[u8; 32]>,
    len: u64,
    path: DataPath,
    cal: AlgorithmCalibration,
) -> Result<Digest, SimError> {
    let mut first = true;
    let configure = |soc: &mut Soc| -> Result<(), SimError> {
        let writes = match mode {
            HashMode::Sha256 => SHA_CONFIG_WRITES,
            HashMode::Hmac => HMAC_CONFIG_WRITES,
        };
        for _ in 0..writes {
            soc.reg_access(ph(PhaseLabel::Configure))?;
        }
        soc.overhead(ph(PhaseLabel::Configure), cal.configure_extra)?;
        let next = soc.hmac.configure(soc.now(), mode, DigestOrder::Big, key)?;
        soc.schedule_engine(next, Event::HmacCompressDone);
        soc.overhead(ph(PhaseLabel::Digest), cal.digest_prologue)
    };

    let parts = chunks(path, len);
    if parts.is_empty() {
        configure(soc)?;
    }
    for (off, at, n) in parts {
        if let DataPath::Staged { src, .. } = path {
            let extra = if first { cal.l3_inbound_latency } else { 0 };
            dma_transfer(soc, src + off, at, n, extra)?;
        }
        if first {
            configure(soc)?;
            first = false;
        }
        let mut done = 0;
        while done < n {
            let blk = (SHA_BLOCK as u64).min(n - done);
            soc.poll(ph(PhaseLabel::Wait), |s| s.hmac.fifo_room() as u64 >= blk)?;
            let mut a = at + done;
            for w in widths(blk) {
                let v = soc.load(ph(PhaseLabel::Digest), a, w)?;
                soc.reg_access(ph(PhaseLabel::Digest))?;
                let bytes = v.to_le_bytes();
                let next = soc.hmac.push(soc.now(), &bytes[..w as usize])?;
                soc.schedule_engine(next, Event::HmacCompressDone);
                soc.loop_tick(ph(PhaseLabel::Digest))?;
                a += u64::from(w);
            }
            done += blk;
        }
    }

    let fin = ph(PhaseLabel::Finalize);
    soc.reg_access(fin)?;
    let next = soc.hmac.finalize(soc.now())?;
    soc.schedule_engine(next, Event::HmacCompressDone);
    soc.poll(fin, |s| s.hmac.is_done())?;
    let digest = soc.hmac.read_digest()?;
    let out = match path {
        DataPath::Direct { dst, .. } => dst,
        DataPath::Staged { scratch, chunk, .. } => scratch + chunk,
    };
    for (i, word) in digest.0.chunks_exact(4).enumerate() {
        soc.reg_access(fin)?;
        let v = u32::from_le_bytes(word.try_into().expect("4 bytes"));
        soc.store(fin, out + 4 * i as u64, v, 4)?;
        soc.loop_tick(fin)?;
    }
    if let DataPath::Staged { dst, .. } = path {
        dma_transfer(soc, out, dst, DIGEST_BYTES, 0)?;
    }
    Ok(digest)
}

/// Encrypt or decrypt `len` bytes (a multiple of 16) with the AES-256-CBC
/// accelerator. The result goes to the destination at the same offsets.
#[allow(clippy::too_many_arguments)]
pub fn aes(
    soc: &mut Soc,
    key: &[u8; 32],
    iv: &[u8; 16],
    direction: AesDirection,
    len: u64,
    path: DataPath,
    cal: AlgorithmCalibration,
) -> Result<(), SimError> {
    if !len.is_multiple_of(AES_BLOCK as u64) {
        return Err(crate::crypto::CryptoError::PartialBlock(len as usize).into());
    }
    let cfg = ph(PhaseLabel::Configure);
    let cipher = ph(PhaseLabel::Cipher);
    let wait = ph(PhaseLabel::Wait);
    let mut first = true;
    for (off, at, n) in chunks(path, len) {
        if let DataPath::Staged { src, .. } = path {
            let extra = if first { cal.l3_inbound_latency } else { 0 };
            dma_transfer(soc, src + off, at, n, extra)?;
        }
        if first {
            for _ in 0..AES_CONFIG_WRITES {
                soc.reg_access(cfg)?;
            }
            soc.overhead(cfg, cal.configure_extra)?;
            soc.aes.configure(key, iv, direction)?;
            first = false;
        }
        let out_base = match path {
            DataPath::Direct { dst, .. } => dst,
            DataPath::Staged { .. } => at,
        };
        let blocks = n / AES_BLOCK as u64;
        push_block(soc, at)?;
        for k in 1..=blocks {
            if k < blocks {
                soc.poll(wait, |s| s.aes.input_ready())?;
                push_block(soc, at + k * AES_BLOCK as u64)?;
            }
            soc.poll(wait, |s| s.aes.output_valid())?;
            for _ in 0..4 {
                soc.reg_access(cipher)?;
            }
            let (block, next) = soc.aes.read_output(soc.now())?;
            soc.schedule_engine(next, Event::AesBlockDone);
            let dst = out_base + (k - 1) * AES_BLOCK as u64;
            for (i, word) in block.chunks_exact(4).enumerate() {
                let v = u32::from_le_bytes(word.try_into().expect("4 bytes"));
                soc.store(cipher, dst + 4 * i as u64, v, 4)?;
                soc.loop_tick(cipher)?;
            }
        }
        if let DataPath::Staged { dst, .. } = path {
            dma_transfer(soc, at, dst + off, n, 0)?;
        }
    }
    Ok(())
}

fn push_block(soc: &mut Soc, addr: u64) -> Result<(), SimError> {
    let cipher = ph(PhaseLabel::Cipher);
    for i in 0..4 {
        let v = soc.load(cipher, addr + 4 * i, 4)?;
        soc.reg_access(cipher)?;
        let next = soc.aes.push(soc.now(), &v.to_le_bytes())?;
        soc.schedule_engine(next, Event::AesBlockDone);
        soc.loop_tick(cipher)?;
    }
    Ok(())
}
