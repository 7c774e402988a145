//! Keyed random streams.
//!
//! Every random draw in the pipeline comes from a ChaCha20 stream whose
//! 256-bit key is the SHA-256 digest of a length-prefixed tuple such as
//! `(global seed, dataset, image id, condition name, step index)`. Two work
//! items never share a stream, so results do not depend on thread count or
//! evaluation order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

/// Inputs that identify the stream for one perturbation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey<'a> {
    pub seed: u64,
    pub dataset: &'a str,
    pub image_id: u64,
    pub condition: &'a str,
    pub step: usize,
}

/// Builder for the digest that keys a stream.
#[derive(Clone)]
pub struct KeyBuilder(Sha256);

impl KeyBuilder {
    pub fn new(domain: &str) -> Self {
        KeyBuilder(Sha256::new()).str(domain)
    }

    pub fn str(mut self, s: &str) -> Self {
        self.0.update((s.len() as u64).to_le_bytes());
        self.0.update(s.as_bytes());
        self
    }

    pub fn u64(mut self, v: u64) -> Self {
        self.0.update(v.to_le_bytes());
        self
    }

    pub fn finish(self) -> RngStream {
        let digest: [u8; 32] = self.0.finalize().into();
        RngStream(ChaCha20Rng::from_seed(digest))
    }
}

#[derive(Clone, Debug)]
pub struct RngStream(ChaCha20Rng);

impl RngStream {
    pub fn for_step(key: &StreamKey<'_>) -> Self {
        KeyBuilder::new("perturb")
            .u64(key.seed)
            .str(key.dataset)
            .u64(key.image_id)
            .str(key.condition)
            .u64(key.step as u64)
            .finish()
    }

    pub fn for_sampling(seed: u64, dataset: &str) -> Self {
        KeyBuilder::new("sample").u64(seed).str(dataset).finish()
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound` by rejection, no modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.0.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
