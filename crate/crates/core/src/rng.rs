//! Seeded random streams.
//!
//! Every random choice in the crate draws from a [`Stream`]. A stream is a
//! SplitMix64 generator; child streams for independent trials or Las Vegas
//! attempts are derived from `(seed, index)` so results never depend on the
//! order in which trials run.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone)]
pub struct Stream {
    seed: u64,
    rng: SplitMix64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream; does not advance `self`.
    pub fn substream(&self, index: u64) -> Stream {
        Stream::new(derive_seed(self.seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Exactly uniform integer in `[0, bound)` by rejection on 64-bit draws.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Largest multiple of `bound` representable in a u64 draw.
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }

    pub fn below_usize(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `count` distinct values from `[0, bound)` (Floyd's algorithm), sorted.
    pub fn distinct(&mut self, bound: usize, count: usize) -> Vec<usize> {
        assert!(
            count <= bound,
            "cannot pick {count} distinct values below {bound}"
        );
        let mut chosen = std::collections::BTreeSet::new();
        for j in (bound - count)..bound {
            let t = self.below_usize(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }
}
