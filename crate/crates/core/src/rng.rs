//! Deterministic sub-stream derivation.
//!
//! Every random quantity in the crate is drawn from a stream keyed by
//! `splitmix64_mix(seed ^ tag ^ index)`. Tags occupy the top byte so that
//! `tag ^ index` never collides for indices below 2^56. Streams are
//! independent of evaluation order, which is what lets generation, attacks
//! and trials run in parallel and still reproduce bit-for-bit.

/// Purpose tag for a derived stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Tag {
    Bias = 0x01,
    Entry = 0x02,
    Attack = 0x03,
    Trial = 0x04,
    Codebook = 0x05,
    AttackSeed = 0x06,
}

impl Tag {
    #[inline]
    fn bits(self) -> u64 {
        (self as u64) << 56
    }
}

/// The splitmix64 finalizer (increment followed by the two xor-shift-multiply rounds).
#[inline]
pub fn splitmix64_mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit value for `(seed, tag, index)`.
#[inline]
pub fn derive(seed: u64, tag: Tag, index: u64) -> u64 {
    debug_assert!(index < 1 << 56, "stream index overflows into the tag byte");
    splitmix64_mix(seed ^ tag.bits() ^ index)
}

/// Maps 64 random bits onto `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential splitmix64 generator.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(state: u64) -> Self {
        Self { state }
    }

    pub fn derived(seed: u64, tag: Tag, index: u64) -> Self {
        Self::new(derive(seed, tag, index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }
}

/// Uniform integer in `0..bound` by multiply-shift.
#[inline]
pub fn below(bits: u64, bound: u64) -> u64 {
    ((bits as u128 * bound as u128) >> 64) as u64
}
