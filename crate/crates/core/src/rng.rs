//! Seed derivation.
//!
//! Every stochastic draw goes through a `ChaCha8Rng` keyed by a 64-bit seed
//! derived from a parent seed and a path of integer labels with the
//! SplitMix64 finaliser. Derived seeds depend only on the labels, never on
//! draw order, so results do not change with thread count or evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `labels` into `seed`.
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(mix64(seed), |acc, &l| mix64(acc ^ mix64(l.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn substream(seed: u64, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, labels))
}

/// Stream tags.
pub mod tag {
    pub const TOPOLOGY_CU: u64 = 1;
    pub const TOPOLOGY_MGTX: u64 = 2;
    pub const TOPOLOGY_RX: u64 = 3;
    pub const GAINS: u64 = 4;
    pub const RANDOM_ALLOC: u64 = 5;
    pub const RUN: u64 = 6;

    pub const NODE_BS: u64 = 0;
    pub const NODE_CU: u64 = 1;
    pub const NODE_MGTX: u64 = 2;
    pub const NODE_RX: u64 = 3;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_stable_and_label_sensitive() {
        assert_eq!(derive_seed(7, &[1, 2]), derive_seed(7, &[1, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
        assert_ne!(derive_seed(7, &[1]), derive_seed(8, &[1]));
        let a: u64 = substream(3, &[4]).random();
        let b: u64 = substream(3, &[4]).random();
        assert_eq!(a, b);
    }

    #[test]
    fn splitmix_reference_value() {
        // First output of the reference SplitMix64 generator seeded with 0.
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
    }
}
