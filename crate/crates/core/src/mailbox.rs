// Licensed under the Apache-2.0 license

//! Shared mailbox through which the host delegates work to the secure
//! element, with one doorbell interrupt in each direction.
//!
//! Register file (32-bit registers, 4-byte stride from the mailbox base):
//!
//! | offset | register        |
//! |--------|-----------------|
//! | 0x00   | channel status  |
//! | 0x04   | flags           |
//! | 0x08   | length          |
//! | 0x0c   | message header  |
//! | 0x10   | payload\[0..6\] |
//! | 0x28   | doorbell to RoT |
//! | 0x2c   | doorbell to host|

use serde::{Deserialize, Serialize};

use crate::bench::calibration::Calibration;
use crate::bench::program::{self, DataPath};
use crate::crypto::{AesDirection, HashMode};
use crate::memsys::{regs::MAILBOX_BASE, ArchVariant, RegionKind};
use crate::soc::{Activity, Event, Soc};
use crate::SimError;

pub const REG_STATUS: u64 = 0x00;
pub const REG_FLAGS: u64 = 0x04;
pub const REG_LENGTH: u64 = 0x08;
pub const REG_MSG_HEADER: u64 = 0x0c;
pub const REG_PAYLOAD: u64 = 0x10;
pub const PAYLOAD_WORDS: usize = 6;
pub const REG_DOORBELL_ROT: u64 = 0x28;
pub const REG_DOORBELL_HOST: u64 = 0x2c;
pub const WINDOW_BYTES: u64 = 0x30;

/// Protocol identifier carried in bits [17:10] of the message header.
pub const PROTOCOL_ID: u32 = 0x80;
/// Bit 0 of the flags register: completion interrupt requested.
pub const FLAG_IRQ: u32 = 1;

/// Stable numeric opcodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Opcode {
    Sha256 = 0x01,
    HmacSha256 = 0x02,
    AesEncCbc = 0x03,
    AesDecCbc = 0x04,
    Boot = 0x10,
}

impl Opcode {
    pub fn from_u32(v: u32) -> Option<Opcode> {
        Some(match v {
            0x01 => Opcode::Sha256,
            0x02 => Opcode::HmacSha256,
            0x03 => Opcode::AesEncCbc,
            0x04 => Opcode::AesDecCbc,
            0x10 => Opcode::Boot,
            _ => return None,
        })
    }
}

pub fn msg_header(opcode: u32) -> u32 {
    (PROTOCOL_ID << 10) | (opcode & 0xff)
}

pub fn header_opcode(header: u32) -> u32 {
    header & 0xff
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelStatus {
    Free,
    Busy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompletionStatus {
    Ok,
    BadOpcode,
    BadPointer,
    Busy,
    /// AES length not a whole number of blocks.
    BadLength,
    /// Key slot not provisioned.
    BadKey,
}

impl CompletionStatus {
    pub fn encode(self) -> u32 {
        match self {
            CompletionStatus::Ok => 0,
            CompletionStatus::BadOpcode => 1,
            CompletionStatus::BadPointer => 2,
            CompletionStatus::Busy => 3,
            CompletionStatus::BadLength => 4,
            CompletionStatus::BadKey => 5,
        }
    }

    pub fn decode(v: u32) -> Option<Self> {
        Some(match v {
            0 => CompletionStatus::Ok,
            1 => CompletionStatus::BadOpcode,
            2 => CompletionStatus::BadPointer,
            3 => CompletionStatus::Busy,
            4 => CompletionStatus::BadLength,
            5 => CompletionStatus::BadKey,
            _ => return None,
        })
    }
}

/// A delegated task. The opcode is kept raw so that invalid values can be
/// posted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Command {
    pub opcode: u32,
    pub src_ptr: u32,
    pub length: u32,
    pub dst_ptr: u32,
    pub key_ref: u32,
}

impl Command {
    pub fn new(opcode: Opcode, src_ptr: u32, length: u32, dst_ptr: u32, key_ref: u32) -> Self {
        Command {
            opcode: opcode as u32,
            src_ptr,
            length,
            dst_ptr,
            key_ref,
        }
    }

    pub fn payload(&self) -> [u32; PAYLOAD_WORDS] {
        [self.src_ptr, self.length, self.dst_ptr, self.key_ref, 0, 0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MailboxError {
    #[error("channel busy")]
    ChannelBusy,
    #[error("host write to {addr:#x} outside its mailbox and memory")]
    SlaveExposure { addr: u64 },
    #[error("no completion doorbell arrived")]
    NoDoorbell,
}

/// Secure-element-private key table, indexed by `key_ref`.
#[derive(Clone, Debug, Default)]
pub struct KeyTable {
    slots: Vec<[u8; 32]>,
}

impl KeyTable {
    pub fn provision(&mut self, key: [u8; 32]) -> u32 {
        self.slots.push(key);
        (self.slots.len() - 1) as u32
    }

    pub fn get(&self, slot: u32) -> Option<&[u8; 32]> {
        self.slots.get(slot as usize)
    }
}

#[derive(Clone, Debug)]
pub struct Mailbox {
    channel: ChannelStatus,
    completion: CompletionStatus,
    flags: u32,
    length: u32,
    header: u32,
    payload: [u32; PAYLOAD_WORDS],
    doorbell_rot: bool,
    doorbell_host: bool,
    rot_edges: u64,
    host_edges: u64,
    services: u64,
    pub keys: KeyTable,
}

impl Default for Mailbox {
    fn default() -> Self {
        Self::new()
    }
}

impl Mailbox {
    pub fn new() -> Self {
        Mailbox {
            channel: ChannelStatus::Free,
            completion: CompletionStatus::Ok,
            flags: 0,
            length: 0,
            header: 0,
            payload: [0; PAYLOAD_WORDS],
            doorbell_rot: false,
            doorbell_host: false,
            rot_edges: 0,
            host_edges: 0,
            services: 0,
            keys: KeyTable::default(),
        }
    }

    pub fn channel(&self) -> ChannelStatus {
        self.channel
    }

    pub fn completion(&self) -> CompletionStatus {
        self.completion
    }

    pub fn payload(&self) -> [u32; PAYLOAD_WORDS] {
        self.payload
    }

    pub fn header(&self) -> u32 {
        self.header
    }

    /// Doorbell edges seen towards the secure element.
    pub fn rot_edges(&self) -> u64 {
        self.rot_edges
    }

    pub fn host_edges(&self) -> u64 {
        self.host_edges
    }

    pub fn services(&self) -> u64 {
        self.services
    }

    pub fn doorbell_host_pending(&self) -> bool {
        self.doorbell_host
    }

    pub fn doorbell_rot_pending(&self) -> bool {
        self.doorbell_rot
    }

    pub(crate) fn note_rot_edge(&mut self) {
        self.doorbell_rot = true;
        self.rot_edges += 1;
    }

    pub(crate) fn note_host_edge(&mut self) {
        self.doorbell_host = true;
        self.host_edges += 1;
    }

    /// Register read. Doorbell registers clear on read.
    pub fn read_reg(&mut self, offset: u64) -> u32 {
        match offset {
            REG_STATUS => {
                let busy = u32::from(self.channel == ChannelStatus::Busy);
                busy | (self.completion.encode() << 8)
            }
            REG_FLAGS => self.flags,
            REG_LENGTH => self.length,
            REG_MSG_HEADER => self.header,
            REG_DOORBELL_ROT => u32::from(std::mem::take(&mut self.doorbell_rot)),
            REG_DOORBELL_HOST => u32::from(std::mem::take(&mut self.doorbell_host)),
            o if (REG_PAYLOAD..REG_DOORBELL_ROT).contains(&o) && o % 4 == 0 => {
                self.payload[((o - REG_PAYLOAD) / 4) as usize]
            }
            _ => 0,
        }
    }

    fn write_reg(&mut self, offset: u64, value: u32) {
        match offset {
            REG_FLAGS => self.flags = value,
            REG_LENGTH => self.length = value,
            REG_MSG_HEADER => self.header = value,
            o if (REG_PAYLOAD..REG_DOORBELL_ROT).contains(&o) && o % 4 == 0 => {
                self.payload[((o - REG_PAYLOAD) / 4) as usize] = value
            }
            _ => {}
        }
    }
}

/// Boot address split over two payload words.
pub fn boot_payload(addr: u64) -> [u32; PAYLOAD_WORDS] {
    [addr as u32, (addr >> 32) as u32, 0, 0, 0, 0]
}

impl Soc {
    fn doorbell_delay(&self) -> u64 {
        self.mem.latency().bridge_beat()
    }

    /// Host write into the mailbox window. Any other secure-element address
    /// is a perimeter violation: the host reaches it only through its
    /// master port, never the other way round.
    pub fn host_write_reg(&mut self, addr: u64, value: u32) -> Result<(), MailboxError> {
        let off = addr.wrapping_sub(MAILBOX_BASE);
        if off >= WINDOW_BYTES {
            return Err(MailboxError::SlaveExposure { addr });
        }
        self.mailbox.write_reg(off, value);
        Ok(())
    }

    pub fn host_read_reg(&mut self, addr: u64) -> Result<u32, MailboxError> {
        let off = addr.wrapping_sub(MAILBOX_BASE);
        if off >= WINDOW_BYTES {
            return Err(MailboxError::SlaveExposure { addr });
        }
        Ok(self.mailbox.read_reg(off))
    }

    /// Host store into its own memory.
    pub fn host_write_mem(&mut self, addr: u64, data: &[u8]) -> Result<(), SimError> {
        match self.mem.map().region_of(addr, data.len() as u64) {
            Some(RegionKind::L3) => Ok(self.mem.write_bytes(addr, data)?),
            _ => Err(MailboxError::SlaveExposure { addr }.into()),
        }
    }

    pub fn host_read_mem(&self, addr: u64, len: usize) -> Result<Vec<u8>, SimError> {
        let mut buf = vec![0; len];
        self.mem.read_bytes(addr, &mut buf)?;
        Ok(buf)
    }

    /// Steps 1 and 2: fill the registers and ring the doorbell.
    pub fn host_post(&mut self, cmd: &Command) -> Result<(), MailboxError> {
        if self.mailbox.channel == ChannelStatus::Busy {
            self.mailbox.completion = CompletionStatus::Busy;
            return Err(MailboxError::ChannelBusy);
        }
        self.host_write_reg(MAILBOX_BASE + REG_MSG_HEADER, msg_header(cmd.opcode))?;
        self.host_write_reg(MAILBOX_BASE + REG_LENGTH, cmd.length)?;
        for (i, w) in cmd.payload().into_iter().enumerate() {
            self.host_write_reg(MAILBOX_BASE + REG_PAYLOAD + 4 * i as u64, w)?;
        }
        self.host_write_reg(MAILBOX_BASE + REG_FLAGS, FLAG_IRQ)?;
        self.mailbox.channel = ChannelStatus::Busy;
        let d = self.doorbell_delay();
        self.sched.schedule(d, Event::DoorbellToRot);
        Ok(())
    }

    /// Steps 3 to 7 on the secure element: decode, fetch, execute, store,
    /// notify.
    pub(crate) fn rot_serve(&mut self) -> Result<CompletionStatus, SimError> {
        let act = Activity::Mailbox;
        self.bridge_reg_access(act)?;
        self.mailbox.read_reg(REG_DOORBELL_ROT);
        self.bridge_reg_access(act)?;
        let header = self.mailbox.read_reg(REG_MSG_HEADER);
        for _ in 0..4 {
            self.bridge_reg_access(act)?;
        }
        let p = self.mailbox.payload;
        let cmd = Command {
            opcode: header_opcode(header),
            src_ptr: p[0],
            length: p[1],
            dst_ptr: p[2],
            key_ref: p[3],
        };
        let status = self.execute(&cmd)?;
        self.mailbox.services += 1;
        self.bridge_reg_access(act)?;
        self.mailbox.completion = status;
        self.mailbox.channel = ChannelStatus::Free;
        self.bridge_reg_access(act)?;
        let d = self.doorbell_delay();
        self.sched.schedule(d, Event::DoorbellToHost);
        Ok(status)
    }

    fn in_l3(&self, addr: u64, len: u64) -> bool {
        self.mem.map().l3.contains(addr, len.max(1))
    }

    fn execute(&mut self, cmd: &Command) -> Result<CompletionStatus, SimError> {
        let Some(op) = Opcode::from_u32(cmd.opcode) else {
            return Ok(CompletionStatus::BadOpcode);
        };
        let (src, len, dst) = (u64::from(cmd.src_ptr), u64::from(cmd.length), u64::from(cmd.dst_ptr));
        let cal = Calibration::default();
        let path = |soc: &Soc, src: u64| match soc.variant() {
            ArchVariant::Extended => DataPath::staged(soc, src, dst),
            ArchVariant::Base => DataPath::Direct { src, dst },
        };
        match op {
            Opcode::Boot => Ok(CompletionStatus::Ok),
            Opcode::Sha256 | Opcode::HmacSha256 => {
                if !self.in_l3(src, len) || !self.in_l3(dst, 32) {
                    return Ok(CompletionStatus::BadPointer);
                }
                let (mode, key, c) = if op == Opcode::Sha256 {
                    (HashMode::Sha256, None, cal.sha256)
                } else {
                    match self.mailbox.keys.get(cmd.key_ref) {
                        Some(k) => (HashMode::Hmac, Some(*k), cal.hmac),
                        None => return Ok(CompletionStatus::BadKey),
                    }
                };
                let c = crate::bench::AlgorithmCalibration {
                    l3_inbound_latency: 0,
                    ..c
                };
                let p = path(self, src);
                program::hash(self, mode, key.as_ref(), len, p, c)?;
                Ok(CompletionStatus::Ok)
            }
            Opcode::AesEncCbc | Opcode::AesDecCbc => {
                if len % 16 != 0 {
                    return Ok(CompletionStatus::BadLength);
                }
                if !self.in_l3(src, len + 16) || !self.in_l3(dst, len) {
                    return Ok(CompletionStatus::BadPointer);
                }
                let Some(key) = self.mailbox.keys.get(cmd.key_ref).copied() else {
                    return Ok(CompletionStatus::BadKey);
                };
                let mut iv = [0u8; 16];
                self.mem.read_bytes(src, &mut iv)?;
                let dir = if op == Opcode::AesEncCbc {
                    AesDirection::Encrypt
                } else {
                    AesDirection::Decrypt
                };
                let c = crate::bench::AlgorithmCalibration {
                    l3_inbound_latency: 0,
                    ..cal.aes
                };
                let p = path(self, src + 16);
                program::aes(self, &key, &iv, dir, len, p, c)?;
                Ok(CompletionStatus::Ok)
            }
        }
    }

    /// Host side of step 7: wait for the doorbell, clear it, read status.
    pub fn host_wait_and_read(&mut self) -> Result<CompletionStatus, SimError> {
        if !self.run_until(|s| s.mailbox.doorbell_host)? {
            return Err(MailboxError::NoDoorbell.into());
        }
        self.host_read_reg(MAILBOX_BASE + REG_DOORBELL_HOST)?;
        let st = self.host_read_reg(MAILBOX_BASE + REG_STATUS)?;
        Ok(CompletionStatus::decode(st >> 8).expect("status written by the secure element"))
    }

    /// Secure element hands the host its boot address.
    pub fn rot_notify_boot(&mut self, addr: u64) -> Result<(), SimError> {
        let act = Activity::Boot;
        self.bridge_reg_access(act)?;
        self.mailbox.header = msg_header(Opcode::Boot as u32);
        for (i, w) in boot_payload(addr).into_iter().enumerate() {
            self.bridge_reg_access(act)?;
            self.mailbox.payload[i] = w;
        }
        self.mailbox.completion = CompletionStatus::Ok;
        self.bridge_reg_access(act)?;
        let d = self.doorbell_delay();
        self.sched.schedule(d, Event::DoorbellToHost);
        Ok(())
    }

    /// Host reads the boot address out of the payload registers.
    pub fn host_read_boot_addr(&mut self) -> Result<u64, MailboxError> {
        let lo = self.host_read_reg(MAILBOX_BASE + REG_PAYLOAD)?;
        let hi = self.host_read_reg(MAILBOX_BASE + REG_PAYLOAD + 4)?;
        Ok(u64::from(lo) | (u64::from(hi) << 32))
    }
}
