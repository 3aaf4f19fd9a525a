//! Splittable counter-based pseudorandom generator for reproducible fixtures.
//!
//! Every randomized test, fixture and benchmark in this repository draws
//! from the generator below so that identical seeds regenerate identical
//! data in any implementation language. The algorithm is SplitMix64
//! (Steele, Lea & Flood 2014), fully specified here:
//!
//! ```text
//! GAMMA = 0x9E3779B97F4A7C15  (all arithmetic mod 2^64)
//!
//! next(state):  state += GAMMA
//!               z = state
//!               z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!               z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!               return z ^ (z >> 31)
//!
//! split(seed, label) = mix(seed ^ mix(label))   where mix(x) runs the
//!                      three xor-multiply rounds above on x + GAMMA
//!
//! next_below(b) = next() % b                    (b < 2^31; the modulo
//!                                                bias is < 2^-33 and is
//!                                                accepted for test data)
//! ```
//!
//! `split` derives an independent stream per label, so suites can hand a
//! sub-generator to each instance without coordinating counters.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derives an independent stream for `label` without advancing `self`.
    pub fn split(&self, label: u64) -> Self {
        SplitMix64 {
            state: mix(self.state ^ mix(label)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)` for `bound < 2^31`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0 && bound < (1 << 31));
        self.next_u64() % bound
    }

    /// Uniform signed value in `[lo, hi]`.
    pub fn next_range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.next_below((hi - lo + 1) as u64) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_streams_differ_by_label() {
        let parent = SplitMix64::new(7);
        let mut a = parent.split(1);
        let mut b = parent.split(2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn reference_values_pinned() {
        // First outputs for seed 0, frozen so other implementations can
        // check their port of the generator.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(r.next_u64(), 0x06C4_5D18_8009_454F);
    }
}
