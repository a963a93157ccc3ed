// Licensed under the Apache-2.0 license

//! 38-bit flash words: 32 data bits protected by 6 Hamming check bits.
//!
//! Every one of the 38 codeword positions maps to a distinct non-zero 6-bit
//! syndrome, so any single flipped bit is always detected. Decoding reports
//! corruption only; it does not correct.

const CHECK_BITS: u32 = 6;
const WORD_BITS: u32 = 32 + CHECK_BITS;

/// Hamming position (1..=38) of each data bit: the non-powers-of-two.
const DATA_POSITIONS: [u8; 32] = data_positions();

const fn data_positions() -> [u8; 32] {
    let mut out = [0u8; 32];
    let mut pos = 1u8;
    let mut i = 0;
    while i < 32 {
        if pos & (pos - 1) != 0 {
            out[i] = pos;
            i += 1;
        }
        pos += 1;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ecc38Word {
    pub data: u32,
    pub check: u8,
}

impl Ecc38Word {
    /// Packed form: data in bits [31:0], check bits in [37:32].
    pub fn bits(self) -> u64 {
        u64::from(self.data) | (u64::from(self.check) << 32)
    }

    pub fn from_bits(bits: u64) -> Self {
        Ecc38Word {
            data: bits as u32,
            check: ((bits >> 32) & 0x3f) as u8,
        }
    }

    pub fn flip(self, bit: u32) -> Self {
        assert!(bit < WORD_BITS, "bit {bit} outside 38-bit word");
        Self::from_bits(self.bits() ^ (1 << bit))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EccStatus {
    Clean,
    Corrupt,
}

fn data_syndrome(data: u32) -> u8 {
    DATA_POSITIONS
        .iter()
        .enumerate()
        .filter(|(i, _)| data >> i & 1 == 1)
        .fold(0, |acc, (_, &p)| acc ^ p)
}

pub fn encode(data: u32) -> Ecc38Word {
    Ecc38Word {
        data,
        check: data_syndrome(data),
    }
}

pub fn decode(word: Ecc38Word) -> (u32, EccStatus) {
    let status = if data_syndrome(word.data) ^ (word.check & 0x3f) == 0 {
        EccStatus::Clean
    } else {
        EccStatus::Corrupt
    };
    (word.data, status)
}

/// Packs two 38-bit words into one 76-bit flash entry, low word first.
pub fn pack_entry(lo: Ecc38Word, hi: Ecc38Word) -> u128 {
    u128::from(lo.bits()) | (u128::from(hi.bits()) << 38)
}

pub fn unpack_entry(entry: u128) -> (Ecc38Word, Ecc38Word) {
    let mask = (1u128 << 38) - 1;
    (
        Ecc38Word::from_bits((entry & mask) as u64),
        Ecc38Word::from_bits(((entry >> 38) & mask) as u64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn positions_cover_all_syndromes_uniquely() {
        let mut seen = std::collections::BTreeSet::new();
        for p in DATA_POSITIONS {
            assert!((3..=38).contains(&p));
            assert!(seen.insert(p));
        }
        for j in 0..CHECK_BITS {
            assert!(seen.insert(1 << j));
        }
        assert_eq!(seen.len(), 38);
    }

    #[test]
    fn zero_word() {
        let w = encode(0);
        assert_eq!(w.bits(), 0);
        assert_eq!(decode(w), (0, EccStatus::Clean));
    }

    #[test]
    fn every_single_flip_of_deadbeef_is_detected() {
        let w = encode(0xDEAD_BEEF);
        assert_eq!(decode(w), (0xDEAD_BEEF, EccStatus::Clean));
        for bit in 0..38 {
            assert_eq!(decode(w.flip(bit)).1, EccStatus::Corrupt, "bit {bit}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn round_trip(w: u32) {
            prop_assert_eq!(decode(encode(w)), (w, EccStatus::Clean));
        }
    }

    proptest! {
        #[test]
        fn entry_packing(a: u32, b: u32) {
            let (lo, hi) = (encode(a), encode(b));
            let e = pack_entry(lo, hi);
            prop_assert!(e < 1u128 << 76);
            prop_assert_eq!(unpack_entry(e), (lo, hi));
        }
    }
}
