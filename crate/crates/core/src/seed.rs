//! Seed derivation and small random-draw helpers shared by the generators,
//! the suites and the numerical search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::Rat;

/// Mixes `(seed, index)` into an independent sub-seed (splitmix64 finalizer).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `[-bound, bound]` as a rational.
pub fn small_rat<R: Rng>(rng: &mut R, bound: i64) -> Rat {
    Rat::from_int(rng.random_range(-bound..=bound))
}

/// Uniform nonzero integer in `[-bound, bound]`.
pub fn small_nonzero_rat<R: Rng>(rng: &mut R, bound: i64) -> Rat {
    loop {
        let v = rng.random_range(-bound..=bound);
        if v != 0 {
            return Rat::from_int(v);
        }
    }
}

pub fn small_vec<R: Rng>(rng: &mut R, len: usize, bound: i64) -> Vec<Rat> {
    (0..len).map(|_| small_rat(rng, bound)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..64).map(|i| sub_seed(7, i)).collect();
        let mut sorted = a.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), a.len());
        assert_eq!(sub_seed(7, 3), a[3]);
        assert_ne!(sub_seed(7, 3), sub_seed(8, 3));
    }
}
