//! Seeded counter-based streams.
//!
//! Every generator draws from ChaCha8 keyed by `seed` with a fixed stream
//! id per operation, so adding a new generator never perturbs existing
//! corpora. Normals come from Box–Muller on 53-bit uniforms.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream ids, one per generating operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Haar = 1,
    Contraction = 2,
    Scramble = 3,
    Family = 4,
    Structured = 5,
    Sampling = 6,
}

pub struct CounterRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl CounterRng {
    pub fn new(seed: u64, stream: Stream) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream as u64);
        Self { inner, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Standard complex normal: independent real and imaginary parts with
    /// variance 1/2 each.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.normal() * s, self.normal() * s)
    }

    pub fn unit_phase(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.uniform())
    }
}
