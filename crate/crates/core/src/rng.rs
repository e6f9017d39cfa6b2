//! Deterministic, splittable random streams.
//!
//! Every generator in the crate draws from an [`RngStream`], a counter-based
//! ChaCha12 stream addressed by `(master_seed, stream_id)`. Identical
//! addresses produce identical draw sequences on every platform and in any
//! execution order, which is what makes parallel experiment trials agree
//! bit-for-bit with serial runs.
//!
//! Gaussian variates use the Box-Muller transform on 53-bit uniforms (the
//! second variate of each pair is cached), so a port that reproduces the
//! uniform stream reproduces the normal stream as well.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// A deterministic random stream addressed by `(master_seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha12Rng,
    master_seed: u64,
    stream_id: u64,
    cached_normal: Option<f64>,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        RngStream {
            rng,
            master_seed,
            stream_id,
            cached_normal: None,
        }
    }

    /// A fresh stream with the same master seed and a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        RngStream::new(self.master_seed, stream_id)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform integer in `[0, bound)` by rejection.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "uniform_below requires bound > 0");
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Standard normal variate (Box-Muller, pair cached).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Fair sign in `{-1.0, +1.0}`.
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `k` distinct indices drawn uniformly from `0..n` by a partial
    /// Fisher-Yates shuffle; O(n) time, unbiased.
    pub fn choose_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot choose {k} of {n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.uniform_below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
