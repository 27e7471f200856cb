//! Deterministic splittable PRNG.
//!
//! A splitmix-style 64-bit generator: the state advances by the golden-ratio
//! increment and each output is a finalizer hash of the state. Streams are
//! derived by hashing a label into a fresh seed, so per-suite and per-trial
//! generators depend only on (seed, label, index) and never on execution
//! order — trials merge deterministically whether they ran serially or not.

/// Splitmix64: `state += 0x9E3779B97F4A7C15`, output = mix(state).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Child generator for a labeled stream: seed ⊕ FNV-1a(label), mixed.
    pub fn split_labeled(&self, label: &str) -> SplitMix64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in label.bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        let mut child = SplitMix64::new(self.state ^ h);
        // One mixing step decorrelates the child from the parent stream.
        let s = child.next_u64();
        SplitMix64::new(s)
    }

    /// Child generator for an indexed trial of a labeled stream.
    pub fn split_indexed(&self, label: &str, index: u64) -> SplitMix64 {
        let mut base = self.split_labeled(label);
        let offset = base.next_u64().wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        SplitMix64::new(offset)
    }

    /// Uniform value in `0..bound` (bound ≥ 1) by multiply-shift.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// Signed numerator in `[-max, max]` (zero allowed).
    pub fn small_int(&mut self, max: u64) -> i64 {
        self.below(2 * max + 1) as i64 - max as i64
    }
}
