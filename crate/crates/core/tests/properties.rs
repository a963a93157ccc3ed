// Licensed under the Apache-2.0 license

mod common;

use proptest::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use rotsim_core::bench::{run_benchmark, Workload};
use rotsim_core::crypto::{self, hmac_engine, sha256, AesDirection, AesEngine, HashMode};
use rotsim_core::mailbox::{Command, CompletionStatus, Opcode};
use rotsim_core::{Algorithm, ArchVariant, BenchmarkSpec, Location, PhaseLabel, SimTime, Soc, SocConfig};

fn arb_alg() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        Just(Algorithm::Sha256),
        Just(Algorithm::Hmac),
        Just(Algorithm::Aes256Cbc)
    ]
}

fn arb_variant() -> impl Strategy<Value = ArchVariant> {
    prop_oneof![Just(ArchVariant::Base), Just(ArchVariant::Extended)]
}

fn arb_loc() -> impl Strategy<Value = Location> {
    prop_oneof![Just(Location::L1), Just(Location::L3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reports_are_sound(alg in arb_alg(), n in 1u64..6000, loc in arb_loc(), v in arb_variant(), seed: u64) {
        let n = if alg == Algorithm::Aes256Cbc { n.div_ceil(16) * 16 } else { n };
        let spec = BenchmarkSpec::new(alg, n, loc, v).with_seed(seed);
        let r = run_benchmark(&spec).unwrap();
        let sum: f64 = r.phase_pct.values().sum();
        prop_assert!((sum - 100.0).abs() <= 0.5);
        prop_assert!(r.clks_per_byte >= alg.nominal_clks_per_byte());
        let w = Workload::generate(&spec);
        let want = match alg {
            Algorithm::Sha256 => common::sha256(&w.payload).to_vec(),
            Algorithm::Hmac => common::hmac_sha256(&w.key, &w.payload).to_vec(),
            Algorithm::Aes256Cbc => common::cbc_encrypt(&w.key, &w.iv, &w.payload),
        };
        prop_assert_eq!(&r.digest_hex, &hex::encode(want));
        let dma = r.phase(PhaseLabel::Dma) + r.phase(PhaseLabel::DmaWait);
        prop_assert_eq!(dma > 0.0, loc == Location::L3 && v == ArchVariant::Extended);
        prop_assert_eq!(run_benchmark(&spec).unwrap().total_cycles, r.total_cycles);
    }

    #[test]
    fn extended_never_slower_on_l1(alg in arb_alg(), blocks in 1u64..128) {
        let n = blocks * 16;
        let b = run_benchmark(&BenchmarkSpec::new(alg, n, Location::L1, ArchVariant::Base)).unwrap();
        let e = run_benchmark(&BenchmarkSpec::new(alg, n, Location::L1, ArchVariant::Extended)).unwrap();
        prop_assert!(e.total_cycles <= b.total_cycles);
    }

    #[test]
    fn compression_floor(n in 0usize..4096) {
        let msg = vec![0xa5; n];
        let (_, c) = hmac_engine::oneshot(HashMode::Sha256, None, &msg).unwrap();
        prop_assert_eq!(c, sha256::block_count(n as u64));
        prop_assert!(c * hmac_engine::COMPRESS_CYCLES >= (n as u64 + 9).div_ceil(64) * 80);
        let (_, h) = hmac_engine::oneshot(HashMode::Hmac, Some(&[1; 32]), &msg).unwrap();
        prop_assert!(h >= c + 2);
    }

    #[test]
    fn aes_busy_floor(blocks in 1u64..64) {
        let mut e = AesEngine::new();
        e.configure(&[3; 32], &[4; 16], AesDirection::Encrypt).unwrap();
        let mut t = SimTime::ZERO;
        for _ in 0..blocks {
            let done = e.process_block(t, &[9; 16]).unwrap().unwrap();
            prop_assert!(done.cycles() - t.cycles() >= 72);
            e.on_block_done(done);
            e.read_output(done).unwrap();
            t = done;
        }
        prop_assert!(t.cycles() >= blocks * 72);
    }

    #[test]
    fn mailbox_matches_direct(op in 0usize..4, blocks in 0u32..40, v in arb_variant(), seed: u64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut soc = Soc::new(SocConfig::new(v));
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        let slot = soc.mailbox.keys.provision(key);
        soc.enable_rot_irq().unwrap();
        let l3 = soc.mem.map().l3.base;
        let len = blocks * 16;
        let mut input = vec![0u8; 16 + len as usize];
        rng.fill_bytes(&mut input);
        soc.host_write_mem(l3, &input).unwrap();
        let opcode = [Opcode::Sha256, Opcode::HmacSha256, Opcode::AesEncCbc, Opcode::AesDecCbc][op];
        let dst = l3 + 0x10_0000;
        soc.host_post(&Command::new(opcode, l3 as u32, len, dst as u32, slot)).unwrap();
        prop_assert_eq!(soc.host_wait_and_read().unwrap(), CompletionStatus::Ok);
        let msg = &input[..len as usize];
        let iv: [u8; 16] = input[..16].try_into().unwrap();
        let data = &input[16..];
        let (want, got_len) = match opcode {
            Opcode::Sha256 => (crypto::sha256(msg).0.to_vec(), 32),
            Opcode::HmacSha256 => (crypto::hmac_sha256(&key, msg).0.to_vec(), 32),
            Opcode::AesEncCbc => (common::cbc_encrypt(&key, &iv, data), len as usize),
            _ => (common::cbc_decrypt(&key, &iv, data), len as usize),
        };
        prop_assert_eq!(soc.host_read_mem(dst, got_len).unwrap(), want);
        prop_assert_eq!((soc.mailbox.rot_edges(), soc.mailbox.host_edges()), (1, 1));
    }
}
