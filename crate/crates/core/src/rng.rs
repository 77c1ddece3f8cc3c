//! Seeded splitmix64 generator. Hand-rolled so that certificates and reports
//! stay byte-identical across toolchain and dependency updates.

#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[lo, hi]` inclusive.
    pub fn int_range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Uniform over {-5..5}; used for sampling coefficients.
    pub fn small(&mut self) -> i64 {
        self.int_range(-5, 5)
    }

    /// Uniform over {-5..5} \ {0}.
    pub fn small_nonzero(&mut self) -> i64 {
        loop {
            let v = self.small();
            if v != 0 {
                return v;
            }
        }
    }
}
