// Licensed under the Apache-2.0 license

//! Transaction-level simulator of an embedded root-of-trust with crypto
//! offload: interconnect and DMA latency model, HMAC/SHA-256 and
//! AES-256-CBC accelerators, a host mailbox, the boot chain, and the
//! phase-labeled benchmark programs that measure Clks/B.

pub mod bench;
pub mod bootflow;
pub mod crypto;
pub mod dma;
pub mod engine;
pub mod mailbox;
pub mod memsys;
pub mod soc;

pub use bench::{
    phase_breakdown, reference_grid, run_benchmark, software_speedup, speedup, Algorithm, BenchmarkReport,
    BenchmarkSpec, Location, PhaseLabel, SoftwareBaseline,
};
pub use bootflow::{run_boot, BootMode, BootOutcome, BootResult, BootSources};
pub use crypto::Digest;
pub use engine::SimTime;
pub use memsys::{ArchVariant, LatencyModel, MemoryMap};
pub use soc::{Soc, SocConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Mem(#[from] memsys::MemError),
    #[error(transparent)]
    Crypto(#[from] crypto::CryptoError),
    #[error(transparent)]
    Dma(#[from] dma::DmaError),
    #[error(transparent)]
    Livelock(#[from] engine::LivelockError),
    #[error(transparent)]
    Mailbox(#[from] mailbox::MailboxError),
    #[error("boot: {0}")]
    Boot(String),
    #[error("accounting: {0}")]
    Accounting(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("deadlock: {0}")]
    Deadlock(&'static str),
}
