// Licensed under the Apache-2.0 license

//! Phase-labeled benchmark workloads and their reports.

pub mod calibration;
pub mod program;
mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

pub use calibration::{AlgorithmCalibration, Calibration};
pub use program::DataPath;
pub use report::{reports_from_csv, reports_to_csv, CSV_HEADER};

use crate::crypto::{AesDirection, HashMode};
use crate::memsys::{ArchVariant, NominalBandwidth};
use crate::soc::{Activity, Soc, SocConfig};
use crate::SimError;

/// Semantic label carried by every core action of a benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhaseLabel {
    Configure,
    Digest,
    Wait,
    Finalize,
    Cipher,
    Dma,
    DmaWait,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 7] = [
        PhaseLabel::Configure,
        PhaseLabel::Digest,
        PhaseLabel::Wait,
        PhaseLabel::Finalize,
        PhaseLabel::Cipher,
        PhaseLabel::Dma,
        PhaseLabel::DmaWait,
    ];
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sha256,
    Hmac,
    #[serde(rename = "aes")]
    Aes256Cbc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Sha256, Algorithm::Hmac, Algorithm::Aes256Cbc];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sha256 => "sha256",
            Algorithm::Hmac => "hmac",
            Algorithm::Aes256Cbc => "aes",
        }
    }

    /// Accelerator nominal bandwidth in Clks/B.
    pub fn nominal_clks_per_byte(self) -> f64 {
        let n = NominalBandwidth::new();
        match self {
            Algorithm::Sha256 | Algorithm::Hmac => n.hmac,
            Algorithm::Aes256Cbc => n.aes,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sha256" | "sha-256" => Ok(Algorithm::Sha256),
            "hmac" | "hmac-sha256" => Ok(Algorithm::Hmac),
            "aes" | "aes256cbc" | "aes-256-cbc" => Ok(Algorithm::Aes256Cbc),
            _ => Err(format!("unknown algorithm `{s}` (expected sha256, hmac or aes)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    L1,
    L3,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Location::L1 => "l1",
            Location::L3 => "l3",
        })
    }
}

impl FromStr for Location {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Location::L1),
            "l3" => Ok(Location::L3),
            _ => Err(format!("unknown memory location `{s}` (expected l1 or l3)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub algorithm: Algorithm,
    pub payload_bytes: u64,
    pub location: Location,
    pub variant: ArchVariant,
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn new(algorithm: Algorithm, payload_bytes: u64, location: Location, variant: ArchVariant) -> Self {
        BenchmarkSpec {
            algorithm,
            payload_bytes,
            location,
            variant,
            seed: DEFAULT_SEED,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const REFERENCE_SIZES: [u64; 4] = [64, 256, 1024, 4096];

/// Payload, key and IV of a benchmark, all drawn from the spec's seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Workload {
    pub payload: Vec<u8>,
    pub key: [u8; 32],
    pub iv: [u8; 16],
}

impl Workload {
    pub fn generate(spec: &BenchmarkSpec) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
        let mut key = [0; 32];
        let mut iv = [0; 16];
        rng.fill_bytes(&mut key);
        rng.fill_bytes(&mut iv);
        let mut payload = vec![0; spec.payload_bytes as usize];
        rng.fill_bytes(&mut payload);
        Workload { payload, key, iv }
    }

    /// Functional result computed off the simulator.
    pub fn expected(&self, alg: Algorithm) -> Vec<u8> {
        match alg {
            Algorithm::Sha256 => crate::crypto::sha256(&self.payload).0.to_vec(),
            Algorithm::Hmac => crate::crypto::hmac_sha256(&self.key, &self.payload).0.to_vec(),
            Algorithm::Aes256Cbc => {
                crate::crypto::aes256_cbc_encrypt(&self.key, &self.iv, &self.payload).expect("validated whole blocks")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub algorithm: Algorithm,
    pub payload_bytes: u64,
    pub location: Location,
    pub variant: ArchVariant,
    pub total_cycles: u64,
    pub clks_per_byte: f64,
    pub phase_pct: BTreeMap<PhaseLabel, f64>,
    /// Digest, or the full ciphertext for AES.
    pub digest_hex: String,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn phase(&self, label: PhaseLabel) -> f64 {
        self.phase_pct.get(&label).copied().unwrap_or(0.0)
    }
}

/// Largest payload the L1 layout holds (source and result side by side).
pub const L1_PAYLOAD_LIMIT: u64 = 64 * 1024;
const L1_DST_OFFSET: u64 = 64 * 1024;
const L3_DST_OFFSET: u64 = 0x0100_0000;
pub const L3_PAYLOAD_LIMIT: u64 = L3_DST_OFFSET;

pub fn validate(spec: &BenchmarkSpec) -> Result<(), SimError> {
    let n = spec.payload_bytes;
    if n == 0 {
        return Err(SimError::Config("payload size must be > 0".into()));
    }
    if spec.algorithm == Algorithm::Aes256Cbc && !n.is_multiple_of(16) {
        return Err(SimError::Config(format!(
            "AES-CBC payload must be a multiple of 16 bytes, got {n}"
        )));
    }
    let limit = match spec.location {
        Location::L1 => L1_PAYLOAD_LIMIT,
        Location::L3 => L3_PAYLOAD_LIMIT,
    };
    if n > limit {
        return Err(SimError::Config(format!(
            "payload of {n} bytes exceeds the {limit}-byte {} layout",
            spec.location
        )));
    }
    Ok(())
}

pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkReport, SimError> {
    run_benchmark_with(spec, &Calibration::default())
}

pub fn run_benchmark_with(spec: &BenchmarkSpec, cal: &Calibration) -> Result<BenchmarkReport, SimError> {
    validate(spec)?;
    let work = Workload::generate(spec);
    let mut soc = Soc::new(SocConfig::new(spec.variant));
    let region = match spec.location {
        Location::L1 => soc.mem.map().l1,
        Location::L3 => soc.mem.map().l3,
    };
    let src = region.base;
    let dst = region.base
        + match spec.location {
            Location::L1 => L1_DST_OFFSET,
            Location::L3 => L3_DST_OFFSET,
        };
    soc.mem.write_bytes(src, &work.payload)?;
    let path = match (spec.location, spec.variant) {
        (Location::L3, ArchVariant::Extended) => DataPath::staged(&soc, src, dst),
        _ => DataPath::Direct { src, dst },
    };
    let alg_cal = cal.for_algorithm(spec.algorithm);
    let n = spec.payload_bytes;
    let result = match spec.algorithm {
        Algorithm::Sha256 => program::hash(&mut soc, HashMode::Sha256, None, n, path, alg_cal)?
            .0
            .to_vec(),
        Algorithm::Hmac => program::hash(&mut soc, HashMode::Hmac, Some(&work.key), n, path, alg_cal)?
            .0
            .to_vec(),
        Algorithm::Aes256Cbc => {
            program::aes(&mut soc, &work.key, &work.iv, AesDirection::Encrypt, n, path, alg_cal)?;
            let mut ct = vec![0; n as usize];
            soc.mem.read_bytes(dst, &mut ct)?;
            ct
        }
    };
    if matches!(spec.algorithm, Algorithm::Sha256 | Algorithm::Hmac) {
        let mut stored = [0u8; 32];
        soc.mem.read_bytes(dst, &mut stored)?;
        if stored[..] != result[..] {
            return Err(SimError::Accounting(
                "digest written back differs from engine output".into(),
            ));
        }
    }
    if result != work.expected(spec.algorithm) {
        return Err(SimError::Accounting(format!(
            "{} result does not match the reference",
            spec.algorithm
        )));
    }
    let total = soc.now().cycles();
    let phase_pct = phase_breakdown(&soc, total)?;
    Ok(BenchmarkReport {
        algorithm: spec.algorithm,
        payload_bytes: n,
        location: spec.location,
        variant: spec.variant,
        total_cycles: total,
        clks_per_byte: total as f64 / n as f64,
        phase_pct,
        digest_hex: hex::encode(result),
    })
}

/// Share of `total` cycles per label. Every cycle must be accounted for by
/// a benchmark phase.
pub fn phase_breakdown(soc: &Soc, total: u64) -> Result<BTreeMap<PhaseLabel, f64>, SimError> {
    if total == 0 {
        return Err(SimError::Accounting("empty trace".into()));
    }
    let mut cycles: BTreeMap<PhaseLabel, u64> = PhaseLabel::ALL.iter().map(|l| (*l, 0)).collect();
    let mut sum = 0;
    for (activity, c) in soc.activity_cycles() {
        match activity {
            Activity::Phase(l) => *cycles.get_mut(&l).expect("all labels present") += c,
            other => {
                return Err(SimError::Accounting(format!(
                    "{c} cycles carry no phase label ({other:?})"
                )));
            }
        }
        sum += c;
    }
    if sum != total {
        return Err(SimError::Accounting(format!(
            "{} of {total} cycles unlabeled",
            total.abs_diff(sum)
        )));
    }
    Ok(cycles
        .into_iter()
        .map(|(l, c)| (l, 100.0 * c as f64 / total as f64))
        .collect())
}

/// `a`'s Clks/B over `b`'s: how much faster `b` is.
pub fn speedup(a: &BenchmarkReport, b: &BenchmarkReport) -> Result<f64, SimError> {
    if a.algorithm != b.algorithm || a.payload_bytes != b.payload_bytes {
        return Err(SimError::Config(format!(
            "speedup needs matching runs, got {}/{} B vs {}/{} B",
            a.algorithm, a.payload_bytes, b.algorithm, b.payload_bytes
        )));
    }
    Ok(a.clks_per_byte / b.clks_per_byte)
}

/// Clks/B of the pure-software implementations on the host core.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftwareBaseline {
    pub sha256: f64,
    pub hmac: f64,
    pub aes: f64,
}

impl Default for SoftwareBaseline {
    /// Each constant is the accelerated L1 4096 B figure times the quoted
    /// software speedup: 1.3 × 67, 1.4 × 72 and 4.6 × 44.
    fn default() -> Self {
        SoftwareBaseline {
            sha256: 87.1,
            hmac: 100.8,
            aes: 202.4,
        }
    }
}

impl SoftwareBaseline {
    pub fn get(&self, alg: Algorithm) -> f64 {
        match alg {
            Algorithm::Sha256 => self.sha256,
            Algorithm::Hmac => self.hmac,
            Algorithm::Aes256Cbc => self.aes,
        }
    }
}

pub fn software_speedup(report: &BenchmarkReport, baseline: &SoftwareBaseline) -> f64 {
    baseline.get(report.algorithm) / report.clks_per_byte
}

/// Every (algorithm, size, location, variant) combination of the reference grid.
pub fn reference_grid() -> Vec<BenchmarkSpec> {
    let mut out = Vec::new();
    for variant in [ArchVariant::Extended, ArchVariant::Base] {
        for alg in Algorithm::ALL {
            for loc in [Location::L1, Location::L3] {
                for size in REFERENCE_SIZES {
                    out.push(BenchmarkSpec::new(alg, size, loc, variant));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha_l1_4096_near_reference() {
        let r = run_benchmark(&BenchmarkSpec::new(
            Algorithm::Sha256,
            4096,
            Location::L1,
            ArchVariant::Extended,
        ))
        .unwrap();
        assert!((r.clks_per_byte - 1.3).abs() <= 0.13, "{}", r.clks_per_byte);
        assert!((r.phase(PhaseLabel::Digest) - 90.9).abs() < 5.0);
        let sum: f64 = r.phase_pct.values().sum();
        assert!((sum - 100.0).abs() <= 0.5);
    }

    #[test]
    fn speedup_rules() {
        let a = run_benchmark(&BenchmarkSpec::new(
            Algorithm::Sha256,
            64,
            Location::L1,
            ArchVariant::Extended,
        ))
        .unwrap();
        assert_eq!(speedup(&a, &a).unwrap(), 1.0);
        let b = run_benchmark(&BenchmarkSpec::new(
            Algorithm::Hmac,
            64,
            Location::L1,
            ArchVariant::Extended,
        ))
        .unwrap();
        assert!(speedup(&a, &b).is_err());
    }

    #[test]
    fn baselines() {
        let b = SoftwareBaseline::default();
        assert!((b.sha256 - 1.3 * 67.0).abs() < 0.05);
        assert!((b.hmac - 1.4 * 72.0).abs() < 0.05);
        assert!((b.aes - 4.6 * 44.0).abs() < 0.05);
    }

    #[test]
    fn validation() {
        let s = BenchmarkSpec::new(Algorithm::Aes256Cbc, 20, Location::L1, ArchVariant::Extended);
        assert!(matches!(run_benchmark(&s), Err(SimError::Config(_))));
        let s = BenchmarkSpec::new(Algorithm::Sha256, 0, Location::L1, ArchVariant::Extended);
        assert!(matches!(run_benchmark(&s), Err(SimError::Config(_))));
    }

    #[test]
    fn odd_sizes_and_chunking() {
        for (alg, n, loc) in [
            (Algorithm::Sha256, 1, Location::L1),
            (Algorithm::Hmac, 77, Location::L3),
            (Algorithm::Sha256, 40_000, Location::L3),
            (Algorithm::Aes256Cbc, 40_000, Location::L3),
        ] {
            for v in [ArchVariant::Base, ArchVariant::Extended] {
                run_benchmark(&BenchmarkSpec::new(alg, n, loc, v)).unwrap();
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let r = run_benchmark(&BenchmarkSpec::new(
            Algorithm::Aes256Cbc,
            64,
            Location::L3,
            ArchVariant::Extended,
        ))
        .unwrap();
        assert_eq!(BenchmarkReport::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(r.digest_hex.len(), 128);
    }

    #[test]
    fn csv_round_trip() {
        let rs: Vec<_> = [Algorithm::Hmac, Algorithm::Aes256Cbc]
            .map(|a| run_benchmark(&BenchmarkSpec::new(a, 256, Location::L1, ArchVariant::Base)).unwrap())
            .into();
        assert_eq!(reports_from_csv(&reports_to_csv(&rs)).unwrap(), rs);
        assert!(reports_from_csv("algorithm,size\nsha256,1\n").is_err());
    }
}
