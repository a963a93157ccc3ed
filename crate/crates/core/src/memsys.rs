// Licensed under the Apache-2.0 license

//! Memory map, backing stores and the per-route latency model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bootflow::ecc::{self, Ecc38Word, EccStatus};

/// Which flavor of the secure element is being simulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchVariant {
    /// Stock interconnect plus the bridge to the host memory; no DMA, no TCDM.
    Base,
    /// Pass-through crossbar FIFOs, DMA engine and TCDM scratchpad.
    Extended,
}

impl ArchVariant {
    pub fn has_dma(self) -> bool {
        matches!(self, ArchVariant::Extended)
    }

    pub fn crossbar_mode(self) -> CrossbarMode {
        match self {
            ArchVariant::Base => CrossbarMode::Registered,
            ArchVariant::Extended => CrossbarMode::PassThrough,
        }
    }
}

impl fmt::Display for ArchVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArchVariant::Base => "base",
            ArchVariant::Extended => "extended",
        })
    }
}

impl FromStr for ArchVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "base" => Ok(ArchVariant::Base),
            "extended" | "ext" => Ok(ArchVariant::Extended),
            _ => Err(format!("unknown architecture `{s}` (expected base or extended)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossbarMode {
    /// Every request/response FIFO registers the transaction.
    Registered,
    /// Empty FIFOs forward combinationally.
    PassThrough,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionKind {
    L1,
    Tcdm,
    L3,
    FlashEmu,
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionKind::L1 => "L1",
            RegionKind::Tcdm => "TCDM",
            RegionKind::L3 => "L3",
            RegionKind::FlashEmu => "FlashEmu",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Master {
    Core,
    Dma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccessOp {
    Read,
    Write(u32),
}

/// Peripheral register windows. Accelerators, DMA, boot manager and flash
/// controller sit behind the internal crossbar; the mailbox lives in the
/// host domain and is reached through the bridge.
pub mod regs {
    pub const ROM_BASE: u64 = 0x0000_8000;
    pub const MAILBOX_BASE: u64 = 0x0400_0000;
    pub const FLASH_CTRL_BASE: u64 = 0x4100_0000;
    pub const AES_BASE: u64 = 0x4110_0000;
    pub const HMAC_BASE: u64 = 0x4111_0000;
    pub const DMA_BASE: u64 = 0x4120_0000;
    pub const BOOT_MGR_BASE: u64 = 0x4130_0000;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TcdmGeometry {
    pub banks: u32,
    pub bank_bytes: u32,
}

impl TcdmGeometry {
    pub fn size(self) -> u64 {
        u64::from(self.banks) * u64::from(self.bank_bytes)
    }
}

impl Default for TcdmGeometry {
    fn default() -> Self {
        TcdmGeometry {
            banks: 8,
            bank_bytes: 4096,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub base: u64,
    pub size: u64,
}

impl RegionSpec {
    pub fn contains(&self, addr: u64, len: u64) -> bool {
        addr >= self.base && addr.checked_add(len).is_some_and(|end| end <= self.base + self.size)
    }
}

/// Bytes of data carried by one 76-bit emulated flash entry.
pub const FLASH_ENTRY_DATA_BYTES: u64 = 8;
const FLASH_ENTRY_MASK: u128 = (1u128 << 76) - 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryMap {
    pub l1: RegionSpec,
    pub tcdm: RegionSpec,
    pub flash: RegionSpec,
    pub l3: RegionSpec,
    pub tcdm_geometry: TcdmGeometry,
    pub flash_banks: u32,
}

impl MemoryMap {
    pub fn with_tcdm(geometry: TcdmGeometry) -> Self {
        let flash_banks = 2;
        let flash_bank_bytes = 32 * 1024;
        MemoryMap {
            l1: RegionSpec {
                kind: RegionKind::L1,
                base: 0x1000_0000,
                size: 128 * 1024,
            },
            tcdm: RegionSpec {
                kind: RegionKind::Tcdm,
                base: 0x1100_0000,
                size: geometry.size(),
            },
            flash: RegionSpec {
                kind: RegionKind::FlashEmu,
                base: 0x2000_0000,
                size: flash_banks * flash_bank_bytes,
            },
            l3: RegionSpec {
                kind: RegionKind::L3,
                base: 0x8000_0000,
                size: 0x4000_0000,
            },
            tcdm_geometry: geometry,
            flash_banks: flash_banks as u32,
        }
    }

    pub fn regions(&self) -> [RegionSpec; 4] {
        [self.l1, self.tcdm, self.flash, self.l3]
    }

    pub fn region_of(&self, addr: u64, len: u64) -> Option<RegionKind> {
        self.regions()
            .into_iter()
            .find(|r| r.contains(addr, len.max(1)))
            .map(|r| r.kind)
    }

    pub fn spec(&self, kind: RegionKind) -> RegionSpec {
        match kind {
            RegionKind::L1 => self.l1,
            RegionKind::Tcdm => self.tcdm,
            RegionKind::L3 => self.l3,
            RegionKind::FlashEmu => self.flash,
        }
    }

    pub fn flash_entries(&self) -> usize {
        (self.flash.size / FLASH_ENTRY_DATA_BYTES) as usize
    }
}

impl Default for MemoryMap {
    fn default() -> Self {
        Self::with_tcdm(TcdmGeometry::default())
    }
}

/// Per-route transaction costs in cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    pub ibex_l1: u64,
    pub ibex_l3: u64,
    pub ibex_tcdm: Option<u64>,
    /// Registered crossbar: request and response FIFOs on both sides.
    pub crossbar_registered: u64,
    pub crossbar_registered_min: u64,
    pub crossbar_passthrough: u64,
    pub cdc_stages: u32,
    /// Measured DMA rate, kept for reference; simulated transfers use
    /// [`bridge_beat_latency`].
    pub dma_clks_per_byte: Option<f64>,
}

impl LatencyModel {
    pub fn for_variant(variant: ArchVariant) -> Self {
        let crossbar_registered = 6;
        let crossbar_passthrough = 2;
        let ibex_l1 = match variant.crossbar_mode() {
            CrossbarMode::Registered => crossbar_registered,
            CrossbarMode::PassThrough => crossbar_passthrough,
        };
        LatencyModel {
            ibex_l1,
            ibex_l3: 23,
            ibex_tcdm: variant.has_dma().then_some(ibex_l1),
            crossbar_registered,
            crossbar_registered_min: 4,
            crossbar_passthrough,
            cdc_stages: 3,
            dma_clks_per_byte: variant.has_dma().then_some(1.4),
        }
    }

    /// Cost of one register access to an internal peripheral (accelerator
    /// FIFOs, status registers, DMA front-end): same route as L1.
    pub fn peripheral(&self) -> u64 {
        self.ibex_l1
    }

    /// Cycles per 4-byte beat through the bridge and CDC stages.
    pub fn bridge_beat(&self) -> u64 {
        bridge_beat_latency(self.cdc_stages)
    }
}

/// One cycle for the beat itself plus a 5/3-cycle synchronizer penalty per
/// CDC stage, rounded up: 3 stages give 6 cycles, 0 stages give 1.
pub fn bridge_beat_latency(cdc_stages: u32) -> u64 {
    1 + (5 * u64::from(cdc_stages)).div_ceil(3)
}

/// Cycles per byte at each unit's nominal rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NominalBandwidth {
    pub aes: f64,
    pub hmac: f64,
    pub dma: f64,
}

impl NominalBandwidth {
    pub const fn new() -> Self {
        NominalBandwidth {
            aes: 72.0 / 16.0,
            hmac: 80.0 / 64.0,
            dma: 1.0 / 4.0,
        }
    }
}

impl Default for NominalBandwidth {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MemError {
    #[error("bus error: address {0:#x} is unmapped")]
    Unmapped(u64),
    #[error("{master:?} has no route to {region}")]
    NoRoute { master: Master, region: RegionKind },
    #[error("write to {0:#x} rejected: emulated flash is write-protected on the main datapath")]
    WriteProtected(u64),
    #[error("unsupported access width {0}")]
    BadWidth(u8),
    #[error("misaligned {width}-byte access at {addr:#x}")]
    Misaligned { addr: u64, width: u8 },
    #[error("uncorrectable ECC error reading flash at {0:#x}")]
    Ecc(u64),
    #[error("crossbar pass-through mode is not available on the base variant")]
    PassThroughUnavailable,
    #[error("flash entry {0} out of range")]
    FlashIndex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Access {
    pub data: u32,
    pub cycles: u64,
}

const PAGE: u64 = 4096;

#[derive(Debug, Default, Clone)]
struct SparseStore {
    pages: BTreeMap<u64, Box<[u8]>>,
}

impl SparseStore {
    fn read(&self, off: u64, buf: &mut [u8]) {
        for (i, b) in buf.iter_mut().enumerate() {
            let a = off + i as u64;
            *b = self.pages.get(&(a / PAGE)).map_or(0, |p| p[(a % PAGE) as usize]);
        }
    }

    fn write(&mut self, off: u64, data: &[u8]) {
        for (i, b) in data.iter().enumerate() {
            let a = off + i as u64;
            let page = self
                .pages
                .entry(a / PAGE)
                .or_insert_with(|| vec![0u8; PAGE as usize].into_boxed_slice());
            page[(a % PAGE) as usize] = *b;
        }
    }
}

/// All backing stores of one simulator instance plus the route costs.
#[derive(Debug, Clone)]
pub struct MemorySystem {
    variant: ArchVariant,
    map: MemoryMap,
    latency: LatencyModel,
    l1: Vec<u8>,
    tcdm: Option<Vec<u8>>,
    l3: SparseStore,
    flash: Vec<u128>,
    flash_commits: u64,
}

impl MemorySystem {
    pub fn new(variant: ArchVariant, map: MemoryMap) -> Self {
        let erased = erased_entry();
        MemorySystem {
            variant,
            latency: LatencyModel::for_variant(variant),
            l1: vec![0; map.l1.size as usize],
            tcdm: variant.has_dma().then(|| vec![0; map.tcdm.size as usize]),
            l3: SparseStore::default(),
            flash: vec![erased; map.flash_entries()],
            flash_commits: 0,
            map,
        }
    }

    pub fn variant(&self) -> ArchVariant {
        self.variant
    }

    pub fn map(&self) -> &MemoryMap {
        &self.map
    }

    pub fn latency(&self) -> &LatencyModel {
        &self.latency
    }

    pub fn latency_mut(&mut self) -> &mut LatencyModel {
        &mut self.latency
    }

    pub fn crossbar_latency(&self, mode: CrossbarMode) -> Result<u64, MemError> {
        match mode {
            CrossbarMode::Registered => Ok(self.latency.crossbar_registered),
            CrossbarMode::PassThrough if self.variant == ArchVariant::Base => Err(MemError::PassThroughUnavailable),
            CrossbarMode::PassThrough => Ok(self.latency.crossbar_passthrough),
        }
    }

    /// Resolve an address range to a region that exists in this variant.
    pub fn resolve(&self, addr: u64, len: u64) -> Result<RegionKind, MemError> {
        match self.map.region_of(addr, len) {
            Some(RegionKind::Tcdm) if self.tcdm.is_none() => Err(MemError::Unmapped(addr)),
            Some(kind) => Ok(kind),
            None => Err(MemError::Unmapped(addr)),
        }
    }

    /// Cycle cost of one transaction from `master` to `region`.
    pub fn route_cost(&self, master: Master, region: RegionKind, op: AccessOp) -> Result<u64, MemError> {
        let lat = &self.latency;
        match (master, region) {
            (Master::Core, RegionKind::L1) => Ok(lat.ibex_l1),
            (Master::Core, RegionKind::Tcdm) => lat.ibex_tcdm.ok_or(MemError::NoRoute { master, region }),
            (Master::Core, RegionKind::L3) => Ok(lat.ibex_l3),
            (Master::Core, RegionKind::FlashEmu) => match op {
                AccessOp::Read => Ok(lat.ibex_l1),
                AccessOp::Write(_) => Err(MemError::WriteProtected(self.map.flash.base)),
            },
            (Master::Dma, RegionKind::Tcdm) if self.tcdm.is_some() => Ok(1),
            (Master::Dma, RegionKind::L3) if self.variant.has_dma() => Ok(lat.bridge_beat()),
            (Master::Dma, region) => Err(MemError::NoRoute { master, region }),
        }
    }

    /// A single timed transaction of 1, 2 or 4 bytes.
    pub fn access(&mut self, master: Master, addr: u64, op: AccessOp, width: u8) -> Result<Access, MemError> {
        if !matches!(width, 1 | 2 | 4) {
            return Err(MemError::BadWidth(width));
        }
        if !addr.is_multiple_of(u64::from(width)) {
            return Err(MemError::Misaligned { addr, width });
        }
        let region = self.resolve(addr, u64::from(width))?;
        let cycles = match (region, op) {
            (RegionKind::FlashEmu, AccessOp::Write(_)) => return Err(MemError::WriteProtected(addr)),
            _ => self.route_cost(master, region, op)?,
        };
        let w = width as usize;
        let data = match op {
            AccessOp::Read => {
                let mut buf = [0u8; 4];
                self.read_bytes(addr, &mut buf[..w])?;
                u32::from_le_bytes(buf)
            }
            AccessOp::Write(v) => {
                self.write_bytes(addr, &v.to_le_bytes()[..w])?;
                v & width_mask(width)
            }
        };
        Ok(Access { data, cycles })
    }

    /// Untimed functional read, used by bulk movers whose cost is accounted
    /// separately.
    pub fn read_bytes(&self, addr: u64, buf: &mut [u8]) -> Result<(), MemError> {
        let len = buf.len() as u64;
        if len == 0 {
            return Ok(());
        }
        let region = self.resolve(addr, len)?;
        let off = addr - self.map.spec(region).base;
        match region {
            RegionKind::L1 => buf.copy_from_slice(&self.l1[off as usize..(off + len) as usize]),
            RegionKind::Tcdm => {
                let t = self.tcdm.as_ref().ok_or(MemError::Unmapped(addr))?;
                buf.copy_from_slice(&t[off as usize..(off + len) as usize]);
            }
            RegionKind::L3 => self.l3.read(off, buf),
            RegionKind::FlashEmu => {
                for (i, b) in buf.iter_mut().enumerate() {
                    let o = off + i as u64;
                    let word = self.flash_word(o / 4)?;
                    *b = word.to_le_bytes()[(o % 4) as usize];
                }
            }
        }
        Ok(())
    }

    /// Untimed functional write. Flash is rejected here: only the flash
    /// controller's alternative datapath commits entries.
    pub fn write_bytes(&mut self, addr: u64, data: &[u8]) -> Result<(), MemError> {
        let len = data.len() as u64;
        if len == 0 {
            return Ok(());
        }
        let region = self.resolve(addr, len)?;
        let off = addr - self.map.spec(region).base;
        match region {
            RegionKind::L1 => self.l1[off as usize..(off + len) as usize].copy_from_slice(data),
            RegionKind::Tcdm => {
                let t = self.tcdm.as_mut().ok_or(MemError::Unmapped(addr))?;
                t[off as usize..(off + len) as usize].copy_from_slice(data);
            }
            RegionKind::L3 => self.l3.write(off, data),
            RegionKind::FlashEmu => return Err(MemError::WriteProtected(addr)),
        }
        Ok(())
    }

    fn flash_word(&self, word_index: u64) -> Result<u32, MemError> {
        let entry = self
            .flash
            .get((word_index / 2) as usize)
            .copied()
            .ok_or(MemError::FlashIndex((word_index / 2) as usize))?;
        let half = if word_index.is_multiple_of(2) {
            entry
        } else {
            entry >> 38
        };
        let word = Ecc38Word::from_bits((half & ((1 << 38) - 1)) as u64);
        match ecc::decode(word) {
            (data, EccStatus::Clean) => Ok(data),
            (_, EccStatus::Corrupt) => Err(MemError::Ecc(self.map.flash.base + word_index * 4)),
        }
    }

    pub fn flash_entry(&self, index: usize) -> Result<u128, MemError> {
        self.flash.get(index).copied().ok_or(MemError::FlashIndex(index))
    }

    pub fn flash_entries(&self) -> &[u128] {
        &self.flash
    }

    /// Number of entries committed since reset.
    pub fn flash_commits(&self) -> u64 {
        self.flash_commits
    }

    /// Commit one 76-bit entry. Only the flash controller calls this.
    pub(crate) fn commit_flash_entry(&mut self, index: usize, entry: u128) -> Result<(), MemError> {
        let slot = self.flash.get_mut(index).ok_or(MemError::FlashIndex(index))?;
        *slot = entry & FLASH_ENTRY_MASK;
        self.flash_commits += 1;
        Ok(())
    }

    /// Flip one stored bit of a flash entry, bypassing every datapath.
    /// Fault injection for tests and scenarios.
    pub fn inject_flash_fault(&mut self, index: usize, bit: u32) -> Result<(), MemError> {
        let slot = self.flash.get_mut(index).ok_or(MemError::FlashIndex(index))?;
        *slot ^= 1u128 << (bit % 76);
        Ok(())
    }
}

fn width_mask(width: u8) -> u32 {
    match width {
        4 => u32::MAX,
        w => (1u32 << (8 * w)) - 1,
    }
}

fn erased_entry() -> u128 {
    let w = u128::from(ecc::encode(0).bits());
    w | (w << 38)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mem(v: ArchVariant) -> MemorySystem {
        MemorySystem::new(v, MemoryMap::default())
    }

    #[test]
    fn crossbar_modes() {
        let ext = mem(ArchVariant::Extended);
        assert_eq!(ext.crossbar_latency(CrossbarMode::Registered), Ok(6));
        assert_eq!(ext.crossbar_latency(CrossbarMode::PassThrough), Ok(2));
        assert!(ext.latency().crossbar_registered >= ext.latency().crossbar_registered_min);
        assert_eq!(ext.latency().crossbar_registered_min, 4);
        let base = mem(ArchVariant::Base);
        assert_eq!(
            base.crossbar_latency(CrossbarMode::PassThrough),
            Err(MemError::PassThroughUnavailable)
        );
    }

    #[test]
    fn core_route_costs() {
        let map = MemoryMap::default();
        let mut ext = mem(ArchVariant::Extended);
        let mut base = mem(ArchVariant::Base);
        let l1 = map.l1.base;
        let l3 = map.l3.base;
        assert_eq!(ext.access(Master::Core, l1, AccessOp::Read, 4).unwrap().cycles, 2);
        assert_eq!(base.access(Master::Core, l1, AccessOp::Read, 4).unwrap().cycles, 6);
        assert_eq!(ext.access(Master::Core, l3, AccessOp::Read, 4).unwrap().cycles, 23);
        assert_eq!(base.access(Master::Core, l3, AccessOp::Read, 4).unwrap().cycles, 23);
        assert_eq!(
            ext.access(Master::Core, map.tcdm.base, AccessOp::Read, 4)
                .unwrap()
                .cycles,
            2
        );
        assert_eq!(
            base.access(Master::Core, map.tcdm.base, AccessOp::Read, 4),
            Err(MemError::Unmapped(map.tcdm.base))
        );
    }

    #[test]
    fn bridge_beats() {
        assert_eq!(bridge_beat_latency(3), 6);
        assert_eq!(bridge_beat_latency(0), 1);
        let per_byte = bridge_beat_latency(3) as f64 / 4.0;
        assert!((per_byte - 1.4).abs() / 1.4 <= 0.10);
    }

    #[test]
    fn nominal_bandwidths() {
        let nb = NominalBandwidth::new();
        assert_eq!(nb.hmac, 1.25);
        assert_eq!(nb.aes, 4.5);
        assert_eq!(nb.dma, 0.25);
    }

    #[test]
    fn tcdm_is_eight_4k_banks() {
        let map = MemoryMap::default();
        assert_eq!(map.tcdm.size, 32 * 1024);
        let regions = map.regions();
        for (i, a) in regions.iter().enumerate() {
            for b in &regions[i + 1..] {
                assert!(a.base + a.size <= b.base || b.base + b.size <= a.base);
            }
        }
    }

    #[test]
    fn flash_rejects_main_path_writes() {
        let mut m = mem(ArchVariant::Extended);
        let a = m.map().flash.base;
        assert_eq!(
            m.access(Master::Core, a, AccessOp::Write(1), 4),
            Err(MemError::WriteProtected(a))
        );
        assert_eq!(m.access(Master::Core, a, AccessOp::Read, 4).unwrap().data, 0);
    }

    #[test]
    fn unmapped_and_bad_width() {
        let mut m = mem(ArchVariant::Extended);
        assert_eq!(
            m.access(Master::Core, 0x5000_0000, AccessOp::Read, 4),
            Err(MemError::Unmapped(0x5000_0000))
        );
        assert_eq!(
            m.access(Master::Core, 0x1000_0000, AccessOp::Read, 3),
            Err(MemError::BadWidth(3))
        );
        assert!(matches!(
            m.access(Master::Core, 0x1000_0001, AccessOp::Read, 2),
            Err(MemError::Misaligned { .. })
        ));
    }

    #[test]
    fn dma_has_no_l1_port() {
        let m = mem(ArchVariant::Extended);
        assert!(matches!(
            m.route_cost(Master::Dma, RegionKind::L1, AccessOp::Read),
            Err(MemError::NoRoute { .. })
        ));
    }

    #[test]
    fn flash_read_detects_faults() {
        let mut m = mem(ArchVariant::Extended);
        let a = m.map().flash.base;
        m.inject_flash_fault(0, 3).unwrap();
        assert_eq!(m.access(Master::Core, a, AccessOp::Read, 4), Err(MemError::Ecc(a)));
        // the upper half of the entry is still intact
        assert!(m.access(Master::Core, a + 4, AccessOp::Read, 4).is_ok());
    }

    proptest! {
        #[test]
        fn read_after_write(region in 0usize..3, off in 0u64..4096, value: u32, wsel in 0usize..3) {
            let width = [1u8, 2, 4][wsel];
            let mut m = mem(ArchVariant::Extended);
            let spec = [m.map().l1, m.map().tcdm, m.map().l3][region];
            let addr = spec.base + (off / 4) * 4;
            m.access(Master::Core, addr, AccessOp::Write(value), width).unwrap();
            let got = m.access(Master::Core, addr, AccessOp::Read, width).unwrap().data;
            prop_assert_eq!(got, value & width_mask(width));
        }

        #[test]
        fn extended_routes_never_slower(region in 0usize..4, wsel in 0usize..3, write: bool) {
            let width = [1u8, 2, 4][wsel];
            let mut base = mem(ArchVariant::Base);
            let mut ext = mem(ArchVariant::Extended);
            let spec = base.map().regions()[region];
            let op = if write { AccessOp::Write(0xA5) } else { AccessOp::Read };
            let e = ext.access(Master::Core, spec.base, op, width);
            if let Ok(b) = base.access(Master::Core, spec.base, op, width) { prop_assert!(e.unwrap().cycles <= b.cycles) }
        }
    }

    #[test]
    fn l3_dominates_l1() {
        for v in [ArchVariant::Base, ArchVariant::Extended] {
            let lat = LatencyModel::for_variant(v);
            assert!(lat.ibex_l3 > lat.ibex_l1);
        }
    }
}
