//! Deterministic pseudo-randomness shared by every generator and sampler.
//!
//! The generator is SplitMix64 (Steele/Lea/Vigna, public domain): 64 bits of
//! state, one add and three xor-shift-multiply rounds per output, identical
//! output on every platform. Reproducibility of the whole artifact hangs on
//! this one algorithm, so it is written out here instead of pulled from a
//! crate whose stream might change between versions.
//!
//! Independent components never share a stream: each derives its own seed
//! with [`child_seed`] / [`child_seed_indexed`], which fold a textual stream
//! label (and optionally an index) into the parent seed.

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0,1) with 53 random bits; never returns 1.0.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, bound). Lemire multiply-shift with rejection, so the
    /// result is unbiased and still fully determined by the stream.
    pub fn index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "index bound must be positive");
        let bound = bound as u64;
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as usize
    }

    /// Uniform in [lo, hi).
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i + 1);
            xs.swap(i, j);
        }
    }

    /// Moves a uniform random k-subset into the first `k` slots of `xs`
    /// (partial Fisher-Yates). The prefix order is part of the draw.
    pub fn partial_shuffle<T>(&mut self, xs: &mut [T], k: usize) {
        let k = k.min(xs.len());
        for i in 0..k {
            let j = i + self.index(xs.len() - i);
            xs.swap(i, j);
        }
    }
}

/// Derives a child seed from (seed, label): FNV-1a over the label bytes,
/// folded over the parent seed, finished with the SplitMix64 mixer.
pub fn child_seed(seed: u64, label: &str) -> u64 {
    let mut h = seed ^ GOLDEN_GAMMA;
    for b in label.as_bytes() {
        h = (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix64(h)
}

/// Child seed for the `index`-th stream of a labelled family.
pub fn child_seed_indexed(seed: u64, label: &str, index: u64) -> u64 {
    mix64(child_seed(seed, label) ^ index.wrapping_mul(GOLDEN_GAMMA))
}
