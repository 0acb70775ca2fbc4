//! Seeded random primitives.
//!
//! Every stochastic routine in the crate draws from [`RngState`], a thin
//! wrapper around ChaCha8. ChaCha8 has a published, platform-independent
//! output stream, so a seed pins every experiment bit-for-bit. Bounded
//! integers are always drawn in `u64` space so that 32- and 64-bit hosts
//! consume the same words.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Single-owner random stream. Not `Sync`-shared: parallel callers derive
/// their own stream with [`RngState::split`].
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for worker `stream`: seeded with `seed ^ stream`
    /// mixed through a SplitMix64 finalizer so neighbouring indices do not
    /// produce related ChaCha keys.
    pub fn split(&self, stream: u64) -> Self {
        let mut z = (self.seed ^ stream).wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Self {
            seed: self.seed ^ stream,
            inner: ChaCha8Rng::seed_from_u64(z),
        }
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform integer in `0..bound`. `bound` must be positive.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        self.inner.random_range(0..bound as u64) as usize
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random::<u64>()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Poisson variate by Knuth's multiplicative method.
    ///
    /// Multiplies uniforms until the running product drops to `e^-lambda` or
    /// below; expected work is `lambda + 1` uniforms. `lambda == 0` still
    /// consumes one uniform so the stream position does not depend on the
    /// parameter being zero.
    pub fn poisson(&mut self, lambda: f64) -> Result<u64> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::invalid(format!(
                "poisson lambda must be finite and non-negative, got {lambda}"
            )));
        }
        let threshold = (-lambda).exp();
        let mut k = 0u64;
        let mut product = 1.0;
        loop {
            product *= self.uniform();
            if product <= threshold {
                return Ok(k);
            }
            k += 1;
        }
    }

    /// `count` distinct elements of `pool`, uniform over all `count`-subsets.
    pub fn choose_without_replacement<T: Copy>(&mut self, pool: &[T], count: usize) -> Result<Vec<T>> {
        if count > pool.len() {
            return Err(Error::invalid(format!(
                "cannot choose {count} items from a pool of {}",
                pool.len()
            )));
        }
        Ok(self.sample_indices(pool.len(), count)
            .into_iter()
            .map(|i| pool[i])
            .collect())
    }

    /// `count` distinct indices from `0..len`. Caller guarantees `count <= len`.
    pub fn sample_indices(&mut self, len: usize, count: usize) -> Vec<usize> {
        debug_assert!(count <= len);
        if count == len {
            return (0..len).collect();
        }
        index::sample(&mut self.inner, len, count).into_vec()
    }
}
