// Licensed under the Apache-2.0 license

//! Wall-clock benchmarks of the simulator. These time the host running the
//! model; simulated cycle counts come from `rotsim_core::run_benchmark`.

use rotsim_core::{Algorithm, ArchVariant, BenchmarkSpec, Location};

/// Largest reference-grid cell per algorithm and location, extended variant.
pub fn headline_specs() -> Vec<BenchmarkSpec> {
    let mut v = Vec::new();
    for alg in Algorithm::ALL {
        for loc in [Location::L1, Location::L3] {
            v.push(BenchmarkSpec::new(alg, 4096, loc, ArchVariant::Extended));
        }
    }
    v
}

/// Deterministic filler; benches only need stable bytes.
pub fn payload(len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| (i as u32).wrapping_mul(2654435761).to_le_bytes()[3])
        .collect()
}
