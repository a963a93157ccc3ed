// Licensed under the Apache-2.0 license

//! Sweep configuration file.
//!
//! ```toml
//! seed = 7                      # optional, default for every run
//!
//! [[run]]                       # explicit runs
//! alg = "sha256"
//! size = 4096
//! mem = "l1"
//! arch = "extended"
//! seed = 1                      # optional
//!
//! [grid]                        # cartesian product, all keys optional
//! algs = ["sha256", "hmac", "aes"]
//! sizes = [64, 256, 1024, 4096]
//! mems = ["l1", "l3"]
//! archs = ["base", "extended"]
//! ```

use serde::Deserialize;

use rotsim_core::bench::{validate, DEFAULT_SEED, REFERENCE_SIZES};
use rotsim_core::{Algorithm, ArchVariant, BenchmarkSpec, Location};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub run: Vec<RunEntry>,
    pub grid: Option<Grid>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub alg: Algorithm,
    pub size: u64,
    pub mem: Location,
    pub arch: ArchVariant,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub algs: Option<Vec<Algorithm>>,
    pub sizes: Option<Vec<u64>>,
    pub mems: Option<Vec<Location>>,
    pub archs: Option<Vec<ArchVariant>>,
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Expanded, validated run list: explicit runs first, then the grid.
    pub fn specs(&self) -> Result<Vec<BenchmarkSpec>, String> {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let mut out: Vec<BenchmarkSpec> = self
            .run
            .iter()
            .map(|r| BenchmarkSpec::new(r.alg, r.size, r.mem, r.arch).with_seed(r.seed.unwrap_or(seed)))
            .collect();
        if let Some(g) = &self.grid {
            let algs = g.algs.clone().unwrap_or(Algorithm::ALL.to_vec());
            let sizes = g.sizes.clone().unwrap_or(REFERENCE_SIZES.to_vec());
            let mems = g.mems.clone().unwrap_or(vec![Location::L1, Location::L3]);
            let archs = g
                .archs
                .clone()
                .unwrap_or(vec![ArchVariant::Extended, ArchVariant::Base]);
            for &v in &archs {
                for &a in &algs {
                    for &m in &mems {
                        for &s in &sizes {
                            out.push(BenchmarkSpec::new(a, s, m, v).with_seed(seed));
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err("sweep lists no runs".into());
        }
        for s in &out {
            validate(s).map_err(|e| e.to_string())?;
        }
        Ok(out)
    }
}
