//! Self-contained deterministic random number generation.
//!
//! Every random quantity in the crate is drawn from a stream derived from a
//! single user seed. Streams are identified by a label and integer indices,
//! so parallel work items (one walk, one graph, one fold assignment) get
//! independent generators whose output does not depend on scheduling.

/// SplitMix64 step; used both as a standalone mixer and to seed xoshiro.
#[inline]
pub fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Collapse a seed, a stream label, and indices into one 64-bit stream key.
pub fn derive_stream(seed: u64, label: &str, indices: &[u64]) -> u64 {
    let mut h = seed ^ 0x51_7c_c1_b7_27_22_0a_95;
    for &b in label.as_bytes() {
        h = mix(h ^ u64::from(b));
    }
    for &ix in indices {
        h = mix(h ^ ix.wrapping_mul(0x2545f4914f6cdd1d));
    }
    mix(h)
}

/// xoshiro256++ generator.
#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        // Seed the state via SplitMix64 as recommended by the xoshiro authors.
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            splitmix64(&mut sm);
            *slot = mix(sm);
        }
        Rng { s }
    }

    /// Generator for a named sub-stream of `seed`.
    pub fn stream(seed: u64, label: &str, indices: &[u64]) -> Self {
        Self::from_seed(derive_stream(seed, label, indices))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, hi).
    #[inline]
    pub fn uniform(&mut self, hi: f64) -> f64 {
        self.next_f64() * hi
    }

    /// Uniform integer in [0, n). Rejection-free modulo of a 64-bit draw is
    /// biased; use Lemire's multiply-shift with rejection.
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let n = n as u64;
        loop {
            let x = self.next_u64();
            let m = (x as u128).wrapping_mul(n as u128);
            let lo = m as u64;
            if lo >= n.wrapping_neg() % n {
                return (m >> 64) as usize;
            }
        }
    }

    /// Standard normal via Box-Muller. One value per call; the sine twin is
    /// discarded to keep the stream layout simple.
    pub fn next_gaussian(&mut self) -> f64 {
        let mut u1 = self.next_f64();
        while u1 <= f64::MIN_POSITIVE {
            u1 = self.next_f64();
        }
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_index(i + 1);
            xs.swap(i, j);
        }
    }
}
