//! Deterministic counter-based randomness.
//!
//! Two primitives cover every random decision in the crate:
//!
//! * [`hash64`] / [`hash_site_index`] — a stateless mix of a seed with a few
//!   words. Instruction tapes are defined as `hash(seed, site, index)`, so
//!   re-reading any tape slot always yields the same value and no tape is
//!   ever materialized.
//! * [`Rng`] — a splitmix64 stream for sequential sampling (walks, initial
//!   configurations). Not cryptographic; stable across platforms.

/// Finalizer from splitmix64. Bijective on `u64`.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `seed` with one extra word.
#[inline(always)]
pub fn hash64(seed: u64, a: u64) -> u64 {
    mix64(seed ^ mix64(a.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Mixes `seed` with three words (site coordinates and tape index).
#[inline(always)]
pub fn hash3(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    let mut h = seed;
    h = mix64(h ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1));
    h = mix64(h ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f).wrapping_add(2));
    mix64(h ^ c.wrapping_add(3))
}

/// Derives an independent stream seed for trial `index` of a run.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    hash64(seed, index)
}

const F64_SCALE: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

/// Converts a raw word to a uniform double in `[0, 1)`.
#[inline(always)]
pub fn to_unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * F64_SCALE
}

/// Sequential splitmix64 generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.state)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    #[inline(always)]
    pub fn next_f64(&mut self) -> f64 {
        to_unit_f64(self.next_u64())
    }

    #[inline(always)]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform integer in `[0, n)`.
    #[inline(always)]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // 128-bit multiply avoids the modulo bias at these ranges.
        (((self.next_u64() as u128) * (n as u128)) >> 64) as u64
    }

    /// Poisson sample by Knuth's product method; fine for the small means
    /// used as particle densities.
    pub fn poisson(&mut self, mean: f64) -> u32 {
        debug_assert!(mean >= 0.0);
        let threshold = (-mean).exp();
        let mut k = 0u32;
        let mut prod = 1.0;
        loop {
            prod *= self.next_f64();
            if prod <= threshold {
                return k;
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn unit_doubles_in_range() {
        let mut rng = Rng::new(3);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut rng = Rng::new(11);
        let mut seen = [false; 7];
        for _ in 0..1_000 {
            let v = rng.below(7) as usize;
            assert!(v < 7);
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn poisson_mean_is_close() {
        let mut rng = Rng::new(5);
        let mean = 0.8;
        let n = 100_000;
        let total: u64 = (0..n).map(|_| rng.poisson(mean) as u64).sum();
        let empirical = total as f64 / n as f64;
        // 4 standard errors of the mean for Poisson(0.8).
        let se = (mean / n as f64).sqrt();
        assert!((empirical - mean).abs() < 4.0 * se);
    }
}
