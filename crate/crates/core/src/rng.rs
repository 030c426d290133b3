//! Seedable xorshift64* generator whose whole state is one 64-bit word.
//!
//! The interpreter keeps that word in the global binding `.Random.seed`, so
//! the generator is explicitly state-based: every draw replaces the binding.

pub const MULTIPLIER: u64 = 2685821657736338717;

/// Substituted whenever seeding would produce the (absorbing) zero state.
pub const ZERO_STATE_REPLACEMENT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Name of the global binding that holds the generator state.
pub const SEED_BINDING: &str = ".Random.seed";

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn from_seed(seed: i64) -> Self {
        let s = splitmix64(seed as u64);
        XorShift64Star { state: if s == 0 { ZERO_STATE_REPLACEMENT } else { s } }
    }

    /// Resumes from a stored state; zero is not a valid state.
    pub fn from_state(state: u64) -> Option<Self> {
        (state != 0).then_some(XorShift64Star { state })
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_word(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(MULTIPLIER)
    }

    /// Uniform draw in [0, 1) from the top 53 bits of the next word.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_word() >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_vector() {
        // First output of the reference splitmix64 stream started at 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = XorShift64Star::from_seed(7);
        let mut b = XorShift64Star::from_seed(7);
        for _ in 0..100 {
            assert_eq!(a.next_word(), b.next_word());
        }
    }

    #[test]
    fn draws_are_in_unit_interval() {
        let mut g = XorShift64Star::from_seed(-3);
        for _ in 0..10_000 {
            let x = g.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn zero_state_is_rejected() {
        assert!(XorShift64Star::from_state(0).is_none());
        assert!(XorShift64Star::from_state(1).is_some());
    }
}
