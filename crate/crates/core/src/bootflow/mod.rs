// Licensed under the Apache-2.0 license

//! Boot manager, flash programming and the three boot modes.
//!
//! Secure: the ROM pulls the image over SPI into L1, programs it into the
//! emulated flash through the alternative datapath, reads it back through
//! the ECC-checked main path, verifies the manifest, runs ROM_EXT and hands
//! the entry point to the host through the mailbox.
//!
//! Hybrid: a JTAG script places the image in L1 and jumps to the ROM. A
//! preload routine programs the flash and sets `flash_preloaded`, so the ROM
//! skips SPI and continues exactly as in secure mode.
//!
//! Debug: the JTAG script runs and nothing is verified.

pub mod ecc;
pub mod flash_ctrl;
pub mod image;
pub mod jtag;
pub mod lifecycle;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use self::flash_ctrl::{encode_entry, entry_registers, FlashError, REG_MUX};
use self::image::{verify_manifest, FlashImage, ImageError, ManifestStatus, HEADER_BYTES, MAX_IMAGE_BYTES};
use self::jtag::{JtagCommand, LoadSource};
use crate::mailbox::CompletionStatus;
use crate::memsys::regs::{BOOT_MGR_BASE, FLASH_CTRL_BASE, ROM_BASE};
use crate::memsys::{ArchVariant, FLASH_ENTRY_DATA_BYTES};
use crate::soc::{Activity, Soc, SocConfig};
use crate::SimError;

pub const REG_BOOT_MODE: u64 = 0x00;
pub const REG_FLASH_PRELOADED: u64 = 0x04;

/// Where SPI and JTAG place the image before it is programmed into flash.
pub const STAGING_ADDR: u64 = 0x1000_0000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BootStrap {
    Secure,
    Debug,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootMode {
    Secure,
    Debug,
    Hybrid,
}

impl BootMode {
    pub fn strap(self) -> BootStrap {
        match self {
            BootMode::Secure => BootStrap::Secure,
            BootMode::Debug | BootMode::Hybrid => BootStrap::Debug,
        }
    }
}

impl FromStr for BootMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "secure" => Ok(BootMode::Secure),
            "debug" => Ok(BootMode::Debug),
            "hybrid" => Ok(BootMode::Hybrid),
            _ => Err(format!("unknown boot mode `{s}` (expected secure, debug or hybrid)")),
        }
    }
}

/// Boot-select register latched from the strap pin at reset, plus the
/// software-writable preload flag.
#[derive(Clone, Debug)]
pub struct BootManager {
    strap_pin: BootStrap,
    latched: BootStrap,
    flash_preloaded: bool,
}

impl Default for BootManager {
    fn default() -> Self {
        BootManager {
            strap_pin: BootStrap::Secure,
            latched: BootStrap::Secure,
            flash_preloaded: false,
        }
    }
}

impl BootManager {
    /// Drive the external pin. Takes effect at the next reset only.
    pub fn set_strap(&mut self, s: BootStrap) {
        self.strap_pin = s;
    }

    pub fn reset(&mut self) {
        self.latched = self.strap_pin;
        self.flash_preloaded = false;
    }

    pub fn boot_mode(&self) -> BootStrap {
        self.latched
    }

    pub fn flash_preloaded(&self) -> bool {
        self.flash_preloaded
    }

    /// Core-side register write. The boot-mode register is read-only.
    pub fn core_write_reg(&mut self, offset: u64, value: u32) {
        if offset == REG_FLASH_PRELOADED {
            self.flash_preloaded = value & 1 == 1;
        }
    }

    pub fn read_reg(&self, offset: u64) -> u32 {
        match offset {
            REG_BOOT_MODE => u32::from(self.latched == BootStrap::Debug),
            REG_FLASH_PRELOADED => u32::from(self.flash_preloaded),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct BootSources {
    pub spi_image: Option<Vec<u8>>,
    pub jtag_script: Option<Vec<JtagCommand>>,
    /// Base directory for `@path` loads.
    pub script_dir: Option<PathBuf>,
    /// SPI transfer cost; boot timing is not part of any benchmark.
    pub spi_clks_per_byte: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BootStage {
    FlashRead,
    ManifestVerify,
    RomExt,
    Handoff,
}

impl fmt::Display for BootStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: BootStage,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HaltReason {
    MissingSource(String),
    Image(String),
    Ecc,
    BadDigest,
    BadSignature,
    Script(String),
    Handoff(String),
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaltReason::MissingSource(s) => write!(f, "MissingSource: {s}"),
            HaltReason::Image(s) => write!(f, "BadImage: {s}"),
            HaltReason::Ecc => f.write_str("EccError"),
            HaltReason::BadDigest => f.write_str("BadDigest"),
            HaltReason::BadSignature => f.write_str("BadSignature"),
            HaltReason::Script(s) => write!(f, "Script: {s}"),
            HaltReason::Handoff(s) => write!(f, "Handoff: {s}"),
        }
    }
}

impl From<ImageError> for HaltReason {
    fn from(e: ImageError) -> Self {
        HaltReason::Image(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BootResult {
    HostBooted(u64),
    DebugComplete { pc: u64 },
    Halted(HaltReason),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootOutcome {
    pub result: BootResult,
    /// Stages after the image reaches flash; identical for secure and
    /// hybrid boots of the same image.
    pub stage_log: Vec<StageRecord>,
    pub host_doorbells: u64,
}

impl BootOutcome {
    pub fn failing_stage(&self) -> Option<BootStage> {
        self.stage_log.iter().find(|r| !r.ok).map(|r| r.stage)
    }
}

/// Fresh extended-variant instance, strapped for `mode`, then booted.
pub fn run_boot(mode: BootMode, sources: &BootSources) -> Result<(BootOutcome, Soc), SimError> {
    let mut soc = Soc::new(SocConfig::new(ArchVariant::Extended));
    soc.boot_mgr.set_strap(mode.strap());
    soc.boot_mgr.reset();
    let outcome = soc.boot(mode, sources)?;
    Ok((outcome, soc))
}

struct Flow {
    log: Vec<StageRecord>,
}

impl Flow {
    fn pass(&mut self, stage: BootStage, detail: impl Into<String>) {
        self.log.push(StageRecord {
            stage,
            ok: true,
            detail: detail.into(),
        });
    }

    fn fail(&mut self, stage: BootStage, reason: HaltReason) -> BootResult {
        self.log.push(StageRecord {
            stage,
            ok: false,
            detail: reason.to_string(),
        });
        BootResult::Halted(reason)
    }
}

impl Soc {
    /// Run the boot flow selected by the latched strap. `mode` only
    /// distinguishes the two debug-strap flows.
    pub fn boot(&mut self, mode: BootMode, sources: &BootSources) -> Result<BootOutcome, SimError> {
        let edges = self.mailbox.host_edges();
        let mut flow = Flow { log: Vec::new() };
        let result = match self.boot_mgr.boot_mode() {
            BootStrap::Secure => self.rom(&mut flow, sources)?,
            BootStrap::Debug => self.debug_flow(&mut flow, mode, sources)?,
        };
        Ok(BootOutcome {
            result,
            stage_log: flow.log,
            host_doorbells: self.mailbox.host_edges() - edges,
        })
    }

    fn debug_flow(&mut self, flow: &mut Flow, mode: BootMode, sources: &BootSources) -> Result<BootResult, SimError> {
        let Some(script) = &sources.jtag_script else {
            return Ok(BootResult::Halted(HaltReason::MissingSource(
                "JTAG script required".into(),
            )));
        };
        let mut pc = ROM_BASE;
        let mut staged = None;
        for cmd in script {
            match self.jtag_exec(cmd, sources) {
                Ok(Some(JtagEffect::Pc(p))) => pc = p,
                Ok(Some(JtagEffect::Staged(n))) => staged = Some(n),
                Ok(None) => {}
                Err(r) => return Ok(BootResult::Halted(r)),
            }
        }
        if mode != BootMode::Hybrid {
            return Ok(BootResult::DebugComplete { pc });
        }
        if pc != ROM_BASE {
            return Ok(BootResult::Halted(HaltReason::Script(format!(
                "hybrid script must jump to the ROM entry {ROM_BASE:#x}, not {pc:#x}"
            ))));
        }
        let Some(len) = staged else {
            return Ok(BootResult::Halted(HaltReason::MissingSource(format!(
                "no image loaded at the staging address {STAGING_ADDR:#x}"
            ))));
        };
        if let Err(r) = self.preload(len) {
            return Ok(BootResult::Halted(r));
        }
        self.rom(flow, sources)
    }

    fn jtag_exec(&mut self, cmd: &JtagCommand, sources: &BootSources) -> Result<Option<JtagEffect>, HaltReason> {
        match cmd {
            JtagCommand::Load { addr, data } => {
                let bytes = match data {
                    LoadSource::Bytes(b) => b.clone(),
                    LoadSource::Image => sources
                        .spi_image
                        .clone()
                        .ok_or_else(|| HaltReason::MissingSource("script loads @image but no image given".into()))?,
                    LoadSource::File(p) => {
                        let path = match &sources.script_dir {
                            Some(d) => d.join(p),
                            None => p.clone(),
                        };
                        std::fs::read(&path)
                            .map_err(|e| HaltReason::Script(format!("cannot read {}: {e}", path.display())))?
                    }
                };
                self.mem
                    .write_bytes(*addr, &bytes)
                    .map_err(|e| HaltReason::Script(e.to_string()))?;
                Ok((*addr == STAGING_ADDR).then_some(JtagEffect::Staged(bytes.len())))
            }
            JtagCommand::WriteReg { addr, value } => {
                if addr.wrapping_sub(FLASH_CTRL_BASE) < 0x100 {
                    self.flash_ctrl
                        .write_reg(&mut self.mem, addr - FLASH_CTRL_BASE, *value)
                        .map_err(|e| HaltReason::Script(e.to_string()))?;
                } else if addr.wrapping_sub(BOOT_MGR_BASE) < 0x100 {
                    return Err(HaltReason::Script(
                        "boot manager registers are writable by the secure-element core only".into(),
                    ));
                } else {
                    self.mem
                        .write_bytes(*addr, &value.to_le_bytes())
                        .map_err(|e| HaltReason::Script(e.to_string()))?;
                }
                Ok(None)
            }
            JtagCommand::SetPc(pc) => Ok(Some(JtagEffect::Pc(*pc))),
        }
    }

    /// Copy `len` staged bytes into flash through the alternative datapath
    /// and raise `flash_preloaded`.
    fn preload(&mut self, len: usize) -> Result<(), HaltReason> {
        self.program_flash(len)?;
        self.reg_access(Activity::Boot)
            .map_err(|e| HaltReason::Script(e.to_string()))?;
        self.boot_mgr.core_write_reg(REG_FLASH_PRELOADED, 1);
        Ok(())
    }

    fn program_flash(&mut self, len: usize) -> Result<(), HaltReason> {
        if len > MAX_IMAGE_BYTES {
            return Err(ImageError::TooLarge(len).into());
        }
        let mut data = vec![0u8; len.next_multiple_of(FLASH_ENTRY_DATA_BYTES as usize)];
        self.mem
            .read_bytes(STAGING_ADDR, &mut data[..len])
            .map_err(|e| HaltReason::Image(e.to_string()))?;
        let run = |soc: &mut Soc| -> Result<(), SimError> {
            soc.reg_access(Activity::Boot)?;
            soc.flash_ctrl.write_reg(&mut soc.mem, REG_MUX, 1).map_err(flash_err)?;
            for (i, chunk) in data.chunks_exact(FLASH_ENTRY_DATA_BYTES as usize).enumerate() {
                soc.load(Activity::Boot, STAGING_ADDR + 8 * i as u64, 4)?;
                soc.load(Activity::Boot, STAGING_ADDR + 8 * i as u64 + 4, 4)?;
                let entry = encode_entry(chunk.try_into().expect("8 bytes"));
                for (off, v) in entry_registers(i, entry) {
                    soc.reg_access(Activity::Boot)?;
                    soc.flash_ctrl.write_reg(&mut soc.mem, off, v).map_err(flash_err)?;
                }
            }
            soc.reg_access(Activity::Boot)?;
            soc.flash_ctrl.write_reg(&mut soc.mem, REG_MUX, 0).map_err(flash_err)?;
            Ok(())
        };
        run(self).map_err(|e| HaltReason::Image(e.to_string()))
    }

    /// Mask-ROM flow shared by secure and hybrid boots.
    fn rom(&mut self, flow: &mut Flow, sources: &BootSources) -> Result<BootResult, SimError> {
        if !self.boot_mgr.flash_preloaded() {
            let Some(img) = &sources.spi_image else {
                return Ok(BootResult::Halted(HaltReason::MissingSource(
                    "secure boot needs an SPI image".into(),
                )));
            };
            if img.len() > MAX_IMAGE_BYTES {
                return Ok(BootResult::Halted(ImageError::TooLarge(img.len()).into()));
            }
            self.step(Activity::Boot, sources.spi_clks_per_byte * img.len() as u64)?;
            self.mem.write_bytes(STAGING_ADDR, img)?;
            if let Err(r) = self.program_flash(img.len()) {
                return Ok(BootResult::Halted(r));
            }
        }

        let image = match self.read_flash_image() {
            Ok(i) => i,
            Err(r) => return Ok(flow.fail(BootStage::FlashRead, r)),
        };
        flow.pass(BootStage::FlashRead, format!("{} bytes", image.len()));

        match verify_manifest(&image, &lifecycle::CREATOR_KEY) {
            ManifestStatus::Ok => flow.pass(BootStage::ManifestVerify, "digest and signature valid"),
            ManifestStatus::BadDigest => return Ok(flow.fail(BootStage::ManifestVerify, HaltReason::BadDigest)),
            ManifestStatus::BadSignature => return Ok(flow.fail(BootStage::ManifestVerify, HaltReason::BadSignature)),
        }
        let entry = image.manifest.entry_point;
        flow.pass(BootStage::RomExt, format!("entry {entry:#x}"));

        self.rot_notify_boot(entry)?;
        let status = self.host_wait_and_read()?;
        let addr = self.host_read_boot_addr()?;
        if status != CompletionStatus::Ok || addr != entry {
            return Ok(flow.fail(
                BootStage::Handoff,
                HaltReason::Handoff(format!("host read {addr:#x} with status {status:?}")),
            ));
        }
        flow.pass(BootStage::Handoff, format!("host jumps to {addr:#x}"));
        Ok(BootResult::HostBooted(addr))
    }

    fn read_flash_image(&mut self) -> Result<FlashImage, HaltReason> {
        let base = self.mem.map().flash.base;
        let mut header = [0u8; HEADER_BYTES];
        self.mem.read_bytes(base, &mut header).map_err(|_| HaltReason::Ecc)?;
        let body_len = u64::from_le_bytes(header[16..24].try_into().expect("8 bytes"));
        let total = (HEADER_BYTES as u64).saturating_add(body_len);
        if total > MAX_IMAGE_BYTES as u64 {
            return Err(ImageError::TooLarge(total.min(usize::MAX as u64) as usize).into());
        }
        let mut bytes = vec![0u8; total as usize];
        self.mem.read_bytes(base, &mut bytes).map_err(|_| HaltReason::Ecc)?;
        Ok(FlashImage::parse(&bytes)?)
    }
}

enum JtagEffect {
    Pc(u64),
    Staged(usize),
}

fn flash_err(e: FlashError) -> SimError {
    SimError::Boot(e.to_string())
}
