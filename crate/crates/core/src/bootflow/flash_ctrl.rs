// Licensed under the Apache-2.0 license

//! Flash controller with the alternative write datapath.
//!
//! The main datapath only reads. Writes go through three payload registers
//! holding one 76-bit entry (two ECC-protected 38-bit words), an entry
//! index, and a trigger. The third payload register carries the top 12 bits;
//! its upper 20 bits are dropped.

use super::ecc;
use crate::memsys::{MemError, MemorySystem};

pub const REG_PAYLOAD0: u64 = 0x00;
pub const REG_PAYLOAD1: u64 = 0x04;
pub const REG_PAYLOAD2: u64 = 0x08;
pub const REG_ADDR: u64 = 0x0c;
pub const REG_TRIGGER: u64 = 0x10;
pub const REG_MUX: u64 = 0x14;

pub const ENTRY_BITS: u32 = 76;
pub const ENTRY_MASK: u128 = (1 << ENTRY_BITS) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MuxSelect {
    #[default]
    Main,
    Alt,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlashError {
    #[error("flash write triggered with the main datapath selected")]
    Protection,
    #[error(transparent)]
    Mem(#[from] MemError),
}

#[derive(Clone, Debug, Default)]
pub struct FlashCtrl {
    payload: [u32; 3],
    addr: u32,
    mux: MuxSelect,
    commits: u64,
}

impl FlashCtrl {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mux(&self) -> MuxSelect {
        self.mux
    }

    pub fn commits(&self) -> u64 {
        self.commits
    }

    pub fn write_reg(&mut self, mem: &mut MemorySystem, offset: u64, value: u32) -> Result<(), FlashError> {
        match offset {
            REG_PAYLOAD0 => self.payload[0] = value,
            REG_PAYLOAD1 => self.payload[1] = value,
            REG_PAYLOAD2 => self.payload[2] = value & 0xfff,
            REG_ADDR => self.addr = value,
            REG_MUX => {
                self.mux = if value & 1 == 1 {
                    MuxSelect::Alt
                } else {
                    MuxSelect::Main
                }
            }
            REG_TRIGGER if value & 1 == 1 => {
                if self.mux != MuxSelect::Alt {
                    return Err(FlashError::Protection);
                }
                let entry =
                    u128::from(self.payload[0]) | u128::from(self.payload[1]) << 32 | u128::from(self.payload[2]) << 64;
                mem.commit_flash_entry(self.addr as usize, entry)?;
                self.commits += 1;
            }
            _ => {}
        }
        Ok(())
    }

    pub fn read_reg(&self, offset: u64) -> u32 {
        match offset {
            REG_PAYLOAD0 => self.payload[0],
            REG_PAYLOAD1 => self.payload[1],
            REG_PAYLOAD2 => self.payload[2],
            REG_ADDR => self.addr,
            REG_MUX => u32::from(self.mux == MuxSelect::Alt),
            _ => 0,
        }
    }

    /// Full register sequence for one entry: payloads, address, trigger.
    pub fn write_entry(&mut self, mem: &mut MemorySystem, index: usize, entry: u128) -> Result<(), FlashError> {
        for (off, v) in entry_registers(index, entry) {
            self.write_reg(mem, off, v)?;
        }
        Ok(())
    }
}

/// Register writes that commit `entry` at `index`, in order.
pub fn entry_registers(index: usize, entry: u128) -> [(u64, u32); 5] {
    [
        (REG_PAYLOAD0, entry as u32),
        (REG_PAYLOAD1, (entry >> 32) as u32),
        (REG_PAYLOAD2, (entry >> 64) as u32 & 0xfff),
        (REG_ADDR, index as u32),
        (REG_TRIGGER, 1),
    ]
}

/// 76-bit entry holding 8 data bytes as two ECC words.
pub fn encode_entry(bytes: [u8; 8]) -> u128 {
    let lo = u32::from_le_bytes(bytes[..4].try_into().expect("4 bytes"));
    let hi = u32::from_le_bytes(bytes[4..].try_into().expect("4 bytes"));
    ecc::pack_entry(ecc::encode(lo), ecc::encode(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memsys::{ArchVariant, MemoryMap};
    use rand::{Rng, SeedableRng};

    fn mem() -> MemorySystem {
        MemorySystem::new(ArchVariant::Extended, MemoryMap::default())
    }

    #[test]
    fn alt_path_round_trips_random_entries() {
        let mut m = mem();
        let mut f = FlashCtrl::new();
        f.write_reg(&mut m, REG_MUX, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = m.map().flash_entries();
        for _ in 0..10_000 {
            let v: u128 = rng.gen::<u128>() & ENTRY_MASK;
            let i = rng.gen_range(0..n);
            f.write_entry(&mut m, i, v).unwrap();
            assert_eq!(m.flash_entry(i).unwrap(), v);
        }
    }

    #[test]
    fn main_path_rejects_writes() {
        let mut m = mem();
        let mut f = FlashCtrl::new();
        assert_eq!(f.write_entry(&mut m, 0, 1), Err(FlashError::Protection));
        assert_eq!(m.flash_commits(), 0);
        let base = m.map().flash.base;
        assert!(matches!(m.write_bytes(base, &[1]), Err(MemError::WriteProtected(_))));
    }

    #[test]
    fn payload2_upper_bits_are_dropped() {
        let mut a = mem();
        let mut b = mem();
        let mut f = FlashCtrl::new();
        f.write_reg(&mut a, REG_MUX, 1).unwrap();
        let mut g = f.clone();
        for (off, v) in [
            (REG_PAYLOAD0, 7),
            (REG_PAYLOAD1, 9),
            (REG_PAYLOAD2, 0xabc),
            (REG_ADDR, 5),
            (REG_TRIGGER, 1),
        ] {
            f.write_reg(&mut a, off, v).unwrap();
        }
        for (off, v) in [
            (REG_PAYLOAD0, 7),
            (REG_PAYLOAD1, 9),
            (REG_PAYLOAD2, 0xffff_fabc),
            (REG_ADDR, 5),
            (REG_TRIGGER, 1),
        ] {
            g.write_reg(&mut b, off, v).unwrap();
        }
        assert_eq!(a.flash_entry(5).unwrap(), b.flash_entry(5).unwrap());
        assert_eq!(a.flash_entry(5).unwrap() >> 64, 0xabc);
    }

    #[test]
    fn encoded_entries_read_back_through_main_path() {
        let mut m = mem();
        let mut f = FlashCtrl::new();
        f.write_reg(&mut m, REG_MUX, 1).unwrap();
        f.write_entry(&mut m, 2, encode_entry(*b"otflbody")).unwrap();
        let mut buf = [0; 8];
        m.read_bytes(m.map().flash.base + 16, &mut buf).unwrap();
        assert_eq!(&buf, b"otflbody");
        m.inject_flash_fault(2, 40).unwrap();
        assert!(matches!(
            m.read_bytes(m.map().flash.base + 16, &mut buf),
            Err(MemError::Ecc(_))
        ));
    }
}
