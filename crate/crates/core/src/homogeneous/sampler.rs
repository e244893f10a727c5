//! Reproducible random streams split into fixed-size chunks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par::Execution;

/// Samples per chunk. Each chunk owns an independent generator keyed by
/// `(seed, stream_id, chunk index)`, so sample `i` of a stream is the same
/// whatever the worker count or the total requested.
pub const CHUNK_SIZE: usize = 1024;

/// A space that can produce Haar-distributed points from a random source.
pub trait SampleSpace: Sync {
    type Point: Send;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;
}

/// Seed plus stream identifier for a reproducible sample sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededSampler {
    pub seed: u64,
    pub stream_id: u64,
    #[serde(skip)]
    pub execution: Execution,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededSampler {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self {
            seed,
            stream_id,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// A different stream derived from this one, e.g. for a second
    /// estimation stage that must not reuse the first stage's draws.
    pub fn fork(&self, tag: u64) -> Self {
        let mut s = self.stream_id ^ 0xD1B5_4A32_D192_ED03;
        let a = splitmix64(&mut s);
        let mut t = tag;
        let b = splitmix64(&mut t);
        Self {
            stream_id: a ^ b.rotate_left(17),
            ..*self
        }
    }

    /// Generator for one chunk of this stream.
    pub fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut state = self.seed;
        let mut key = [0u8; 32];
        let mut mix = splitmix64(&mut state) ^ self.stream_id;
        let mut s2 = mix;
        mix = splitmix64(&mut s2) ^ chunk;
        let mut s3 = mix;
        for word in key.chunks_exact_mut(8) {
            word.copy_from_slice(&splitmix64(&mut s3).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }

    /// Draws `count` points and maps each through `f`, in stream order.
    pub fn map_samples<S, T, F>(&self, space: &S, count: usize, f: F) -> Vec<T>
    where
        S: SampleSpace,
        T: Send,
        F: Fn(S::Point) -> T + Sync + Send,
    {
        let chunks = count.div_ceil(CHUNK_SIZE);
        let parts = self.execution.map_chunks(chunks, |c| {
            let mut rng = self.chunk_rng(c as u64);
            let len = CHUNK_SIZE.min(count - c * CHUNK_SIZE);
            (0..len)
                .map(|_| f(space.draw(&mut rng)))
                .collect::<Vec<_>>()
        });
        let mut out = Vec::with_capacity(count);
        for p in parts {
            out.extend(p);
        }
        out
    }

    pub fn sample<S: SampleSpace>(&self, space: &S, count: usize) -> Vec<S::Point> {
        self.map_samples(space, count, |p| p)
    }
}
