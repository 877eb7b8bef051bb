//! Deterministic seeded generators and substream derivation.
//!
//! Experiments key every random draw off a single `u64` seed plus a list of
//! integer tags (trial index, permutation index, purpose). Substreams derived
//! from distinct tag lists are statistically independent and reproducible no
//! matter how work is scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere randomness is needed.
pub type SeededRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a generator for `(seed, tags)`. Distinct tag lists give distinct,
/// well-separated streams.
pub fn substream(seed: u64, tags: &[u64]) -> SeededRng {
    let mut state = splitmix64(seed ^ 0x6b9d_3b7a_94f0_52c1);
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t.wrapping_add(0x51ed_270b)));
    }
    SeededRng::seed_from_u64(state)
}

/// Generator seeded directly from a `u64`.
pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn substreams_are_reproducible() {
        let a: Vec<u64> = substream(7, &[1, 2]).sample_iter(rand::distributions::Standard).take(4).collect();
        let b: Vec<u64> = substream(7, &[1, 2]).sample_iter(rand::distributions::Standard).take(4).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_tags_give_distinct_streams() {
        let a: u64 = substream(7, &[1, 2]).gen();
        let b: u64 = substream(7, &[2, 1]).gen();
        let c: u64 = substream(7, &[1]).gen();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
