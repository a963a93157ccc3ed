// Licensed under the Apache-2.0 license

//! Single-channel DMA moving data across the secure-element perimeter,
//! between host memory (L3) and the TCDM scratchpad.

use serde::{Deserialize, Serialize};

use crate::engine::SimTime;
use crate::memsys::{AccessOp, Master, MemError, MemorySystem, RegionKind};

pub const REG_SRC: u64 = 0x00;
pub const REG_DST: u64 = 0x04;
pub const REG_LENGTH: u64 = 0x08;
pub const REG_TRIGGER: u64 = 0x0c;
pub const REG_STATUS: u64 = 0x10;

pub const BEAT_BYTES: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DmaStatus {
    Idle,
    Busy,
    Done,
    Error,
}

impl DmaStatus {
    pub fn encode(self) -> u32 {
        match self {
            DmaStatus::Idle => 0,
            DmaStatus::Busy => 1,
            DmaStatus::Done => 2,
            DmaStatus::Error => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DmaRegs {
    pub src: u64,
    pub dst: u64,
    pub length: u64,
    pub trigger: bool,
    pub status: DmaStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferDirection {
    /// L3 to TCDM.
    In,
    /// TCDM to L3.
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DmaTransfer {
    pub src: u64,
    pub dst: u64,
    pub length: u64,
    pub beats: u64,
    pub direction: TransferDirection,
    pub cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DmaError {
    #[error("DMA is not present in the base architecture")]
    FeatureAbsent,
    #[error("DMA busy")]
    Busy,
    #[error("zero-length transfer")]
    ZeroLength,
    #[error("transfer needs exactly one TCDM endpoint and one host-memory endpoint ({src} -> {dst})")]
    BadRoute { src: RegionKind, dst: RegionKind },
    #[error("DMA not programmed")]
    NotProgrammed,
    #[error(transparent)]
    Mem(#[from] MemError),
}

#[derive(Debug, Clone)]
pub struct Dma {
    present: bool,
    regs: DmaRegs,
    programmed: Option<DmaTransfer>,
    active: Option<DmaTransfer>,
    extra_latency: u64,
    completed: u64,
}

impl Dma {
    pub fn new(present: bool) -> Self {
        Dma {
            present,
            regs: DmaRegs {
                src: 0,
                dst: 0,
                length: 0,
                trigger: false,
                status: DmaStatus::Idle,
            },
            programmed: None,
            active: None,
            extra_latency: 0,
            completed: 0,
        }
    }

    pub fn regs(&self) -> &DmaRegs {
        &self.regs
    }

    pub fn status(&self) -> DmaStatus {
        self.regs.status
    }

    pub fn completed_transfers(&self) -> u64 {
        self.completed
    }

    /// Fixed latency added to the next started transfer only.
    pub fn set_extra_latency(&mut self, cycles: u64) {
        self.extra_latency = cycles;
    }

    /// Latch source, destination and length. The transfer does not start
    /// until [`Dma::start`].
    pub fn program(&mut self, mem: &MemorySystem, src: u64, dst: u64, length: u64) -> Result<(), DmaError> {
        if !self.present {
            return Err(DmaError::FeatureAbsent);
        }
        if self.regs.status == DmaStatus::Busy {
            return Err(DmaError::Busy);
        }
        if length == 0 {
            return Err(DmaError::ZeroLength);
        }
        let (s, d) = match (mem.resolve(src, length), mem.resolve(dst, length)) {
            (Ok(s), Ok(d)) => (s, d),
            (Err(e), _) | (_, Err(e)) => {
                self.regs.status = DmaStatus::Error;
                return Err(e.into());
            }
        };
        let direction = match (s, d) {
            (RegionKind::L3, RegionKind::Tcdm) => TransferDirection::In,
            (RegionKind::Tcdm, RegionKind::L3) => TransferDirection::Out,
            _ => return Err(DmaError::BadRoute { src: s, dst: d }),
        };
        let beat_cost = mem.route_cost(Master::Dma, RegionKind::L3, AccessOp::Read)?;
        let beats = length.div_ceil(BEAT_BYTES);
        self.regs.src = src;
        self.regs.dst = dst;
        self.regs.length = length;
        self.programmed = Some(DmaTransfer {
            src,
            dst,
            length,
            beats,
            direction,
            cost: beats * beat_cost,
        });
        Ok(())
    }

    /// Trigger the latched transfer; returns its completion time.
    pub fn start(&mut self, now: SimTime) -> Result<SimTime, DmaError> {
        if self.regs.status == DmaStatus::Busy {
            return Err(DmaError::Busy);
        }
        let mut t = self.programmed.take().ok_or(DmaError::NotProgrammed)?;
        t.cost += std::mem::take(&mut self.extra_latency);
        self.regs.trigger = true;
        self.regs.status = DmaStatus::Busy;
        self.active = Some(t);
        Ok(now.after(t.cost))
    }

    /// Completion event: the data lands byte-exact at the destination.
    pub fn on_done(&mut self, mem: &mut MemorySystem) -> Result<DmaTransfer, DmaError> {
        let t = self.active.take().ok_or(DmaError::NotProgrammed)?;
        let mut buf = vec![0u8; t.length as usize];
        let res = mem
            .read_bytes(t.src, &mut buf)
            .and_then(|_| mem.write_bytes(t.dst, &buf));
        self.regs.trigger = false;
        self.regs.status = if res.is_ok() { DmaStatus::Done } else { DmaStatus::Error };
        res?;
        self.completed += 1;
        Ok(t)
    }

    pub fn read_reg(&self, offset: u64) -> u32 {
        match offset {
            REG_SRC => self.regs.src as u32,
            REG_DST => self.regs.dst as u32,
            REG_LENGTH => self.regs.length as u32,
            REG_TRIGGER => u32::from(self.regs.trigger),
            REG_STATUS => self.regs.status.encode(),
            _ => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memsys::{ArchVariant, MemoryMap};
    use proptest::prelude::*;

    fn setup() -> (Dma, MemorySystem) {
        (
            Dma::new(true),
            MemorySystem::new(ArchVariant::Extended, MemoryMap::default()),
        )
    }

    #[test]
    fn l3_to_tcdm_is_accepted() {
        let (mut dma, mem) = setup();
        let (l3, tcdm) = (mem.map().l3.base, mem.map().tcdm.base);
        dma.program(&mem, l3, tcdm, 4096).unwrap();
        assert_eq!(dma.status(), DmaStatus::Idle);
        assert_eq!(dma.regs().length, 4096);
    }

    #[test]
    fn route_rules() {
        let (mut dma, mem) = setup();
        let l1 = mem.map().l1.base;
        assert!(matches!(
            dma.program(&mem, l1, l1 + 64, 64),
            Err(DmaError::BadRoute { .. })
        ));
        assert_eq!(
            dma.program(&mem, mem.map().l3.base, mem.map().tcdm.base, 0),
            Err(DmaError::ZeroLength)
        );
        assert!(matches!(
            dma.program(&mem, 0x5000_0000, mem.map().tcdm.base, 4),
            Err(DmaError::Mem(_))
        ));
        assert_eq!(dma.status(), DmaStatus::Error);
        let base = MemorySystem::new(ArchVariant::Base, MemoryMap::default());
        assert_eq!(
            Dma::new(false).program(&base, base.map().l3.base, 0x1100_0000, 4),
            Err(DmaError::FeatureAbsent)
        );
    }

    #[test]
    fn busy_rejects_program() {
        let (mut dma, mem) = setup();
        let (l3, tcdm) = (mem.map().l3.base, mem.map().tcdm.base);
        dma.program(&mem, l3, tcdm, 64).unwrap();
        dma.start(SimTime(0)).unwrap();
        assert_eq!(dma.status(), DmaStatus::Busy);
        assert_eq!(dma.program(&mem, l3, tcdm, 64), Err(DmaError::Busy));
    }

    #[test]
    fn costs_follow_beats() {
        let (mut dma, mem) = setup();
        let (l3, tcdm) = (mem.map().l3.base, mem.map().tcdm.base);
        dma.program(&mem, l3, tcdm, 4096).unwrap();
        let done = dma.start(SimTime(0)).unwrap().cycles();
        assert!((done as f64 - 5734.0).abs() <= 573.4, "{done}");
        let mut dma = Dma::new(true);
        dma.program(&mem, l3, tcdm, 4).unwrap();
        assert_eq!(dma.start(SimTime(10)).unwrap(), SimTime(16));
        // misaligned length rounds up to whole beats
        dma.on_done(&mut mem.clone()).unwrap();
        dma.program(&mem, l3, tcdm, 5).unwrap();
        assert_eq!(dma.start(SimTime(0)).unwrap(), SimTime(12));
    }

    #[test]
    fn extra_latency_applies_once() {
        let (mut dma, mut mem) = setup();
        let (l3, tcdm) = (mem.map().l3.base, mem.map().tcdm.base);
        dma.set_extra_latency(100);
        dma.program(&mem, l3, tcdm, 4).unwrap();
        assert_eq!(dma.start(SimTime(0)).unwrap(), SimTime(106));
        dma.on_done(&mut mem).unwrap();
        dma.program(&mem, l3, tcdm, 4).unwrap();
        assert_eq!(dma.start(SimTime(0)).unwrap(), SimTime(6));
    }

    #[test]
    fn nominal_rate_without_cdc() {
        let (mut dma, mut mem) = setup();
        mem.latency_mut().cdc_stages = 0;
        dma.program(&mem, mem.map().l3.base, mem.map().tcdm.base, 4096).unwrap();
        let cycles = dma.start(SimTime(0)).unwrap().cycles();
        assert_eq!(cycles as f64 / 4096.0, 0.25);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn copies_are_byte_exact(len in 1usize..=8192, seed: u64, outbound: bool) {
            let mut dma = Dma::new(true);
            let mut mem = MemorySystem::new(ArchVariant::Extended, MemoryMap::with_tcdm(
                crate::memsys::TcdmGeometry { banks: 8, bank_bytes: 4096 }));
            let (l3, tcdm) = (mem.map().l3.base + 0x100, mem.map().tcdm.base);
            let data: Vec<u8> = (0..len).map(|i| (seed.wrapping_mul(i as u64 + 1) >> 7) as u8).collect();
            let (src, dst) = if outbound { (tcdm, l3) } else { (l3, tcdm) };
            mem.write_bytes(src, &data).unwrap();
            // sentinel right after the destination must survive (tail masking)
            mem.write_bytes(dst + len as u64, &[0xEE; 4]).unwrap();
            dma.program(&mem, src, dst, len as u64).unwrap();
            let done = dma.start(SimTime(0)).unwrap();
            dma.on_done(&mut mem).unwrap();
            prop_assert_eq!(dma.status(), DmaStatus::Done);
            let mut got = vec![0; len];
            mem.read_bytes(dst, &mut got).unwrap();
            prop_assert_eq!(got, data);
            let mut sentinel = [0; 4];
            mem.read_bytes(dst + len as u64, &mut sentinel).unwrap();
            prop_assert_eq!(sentinel, [0xEE; 4]);
            if len >= 1024 {
                let rate = done.cycles() as f64 / len as f64;
                prop_assert!((1.25..=1.55).contains(&rate), "rate {}", rate);
            }
        }
    }
}
