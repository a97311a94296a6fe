//! Chunked Monte Carlo execution.
//!
//! Sample budgets are split into fixed-size chunks. Chunk `i` draws from
//! `random::stream(seed, domain, i)` and produces a partial accumulator; the
//! partials are merged strictly in chunk order. Results therefore depend only
//! on `(seed, samples, chunk_size)`, never on how chunks are scheduled, which
//! is what lets a parallel executor reproduce the sequential output bit for
//! bit.

use alloc::vec::Vec;

use crate::random::{self, QRng};

/// Samples per chunk unless configured otherwise.
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloPlan {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl MonteCarloPlan {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        assert!(chunk_size > 0, "chunk size must be positive");
        self.chunk_size = chunk_size;
        self
    }

    pub fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(self.chunk_size)
    }

    pub fn chunk_len(&self, chunk: u64) -> u64 {
        let start = chunk * self.chunk_size;
        self.chunk_size.min(self.samples.saturating_sub(start))
    }

    pub fn chunk_rng(&self, domain: &str, chunk: u64) -> QRng {
        random::stream(self.seed, domain, chunk)
    }
}

/// Runs independent chunk jobs and returns their results in chunk order.
pub trait ChunkExecutor {
    fn map_chunks<T, F>(&self, count: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs chunks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ChunkExecutor for Sequential {
    fn map_chunks<T, F>(&self, count: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..count).map(job).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_the_budget() {
        let plan = MonteCarloPlan::new(10, 0).with_chunk_size(4);
        assert_eq!(plan.chunk_count(), 3);
        let lens: Vec<u64> = (0..3).map(|c| plan.chunk_len(c)).collect();
        assert_eq!(lens, [4, 4, 2]);
        assert_eq!(MonteCarloPlan::new(0, 0).chunk_count(), 0);
    }
}
