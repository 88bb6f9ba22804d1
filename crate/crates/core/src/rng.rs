//! Reproducible randomness.
//!
//! All sampling in this crate goes through [`CounterRng`], a counter-based
//! generator keyed by a `(seed, stream)` pair. Every draw is a pure function
//! of `(seed, stream, draw index)`, so independent trials can run on any
//! number of threads in any order and still produce bit-identical results.

use serde::{Deserialize, Serialize};

use crate::C64;

/// Identifies one random stream: a master seed plus a stream id
/// (conventionally the trial index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeedSpec { seed, stream }
    }

    /// The same master seed, next stream id.
    pub fn next_stream(self) -> Self {
        SeedSpec {
            seed: self.seed,
            stream: self.stream.wrapping_add(1),
        }
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator: output `i` is `mix(base + (i+1)*GOLDEN)` where
/// `base` is derived from the seed spec. Box-Muller supplies normal variates.
#[derive(Clone, Debug)]
pub struct CounterRng {
    base: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(spec: SeedSpec) -> Self {
        let base = mix(spec.seed.wrapping_mul(GOLDEN).wrapping_add(0x243F_6A88_85A3_08D3))
            ^ mix(spec
                .stream
                .wrapping_mul(0xD1B5_4A32_D192_ED03)
                .wrapping_add(0x4528_21E6_3819_8A2B));
        CounterRng {
            base,
            counter: 0,
            spare_normal: None,
        }
    }

    pub fn from_parts(seed: u64, stream: u64) -> Self {
        Self::new(SeedSpec::new(seed, stream))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.base.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard real normal (mean 0, variance 1).
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0,1] so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Complex Gaussian with `E|z|^2 = sigma^2` (each real part has
    /// variance `sigma^2 / 2`).
    pub fn complex_gaussian(&mut self, sigma: f64) -> C64 {
        let scale = sigma / std::f64::consts::SQRT_2;
        C64::new(
            scale * self.standard_normal(),
            scale * self.standard_normal(),
        )
    }
}
