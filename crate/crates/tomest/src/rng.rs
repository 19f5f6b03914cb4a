//! Splittable counter-based random numbers for reproducible Monte Carlo.
//!
//! Each `(seed, stream)` pair names an independent deterministic sequence,
//! so per-trial and per-chunk streams can be drawn in parallel and still
//! reproduce byte-for-byte.  The generator is the splitmix64 output
//! function applied to an incrementing counter.

use rand::RngCore;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based generator: state advances by a fixed increment, output is
/// a bijective mix of the counter.
#[derive(Clone, Debug)]
pub struct CounterRng {
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// The `stream`-th independent sequence for this seed.
    pub fn stream(seed: u64, stream: u64) -> Self {
        // Decorrelate (seed, stream) pairs before counting.
        let base = mix(mix(seed).wrapping_add(stream.wrapping_mul(GOLDEN_GAMMA).wrapping_add(1)));
        CounterRng { counter: base }
    }

    pub fn next_u64_value(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(GOLDEN_GAMMA);
        mix(self.counter)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64_value() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One categorical draw from a probability vector (CDF walk).
    pub fn next_category(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        probs.len() - 1
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64_value() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next_u64_value()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64_value().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
