//! Rayon-backed chunk executor.

use rayon::prelude::*;

use qmeas_core::montecarlo::ChunkExecutor;

use crate::RunError;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "QMEAS_THREADS";

pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `None` uses one worker per available core.
    pub fn new(threads: Option<usize>) -> Result<Self, RunError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| RunError::Numerical(format!("could not start worker pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn from_env() -> Result<Self, RunError> {
        Self::new(threads_from_env()?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

pub fn threads_from_env() -> Result<Option<usize>, RunError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(RunError::Schema(format!("{THREADS_ENV}: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(RunError::Schema(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

impl ChunkExecutor for RayonExecutor {
    fn map_chunks<T, F>(&self, count: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(job).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmeas_core::montecarlo::Sequential;
    use qmeas_core::subquantum::{hv_correlation_table_with, spin_direction, ChshSettings, SphereModel};

    #[test]
    fn chunk_order_is_preserved() {
        let exec = RayonExecutor::new(Some(4)).unwrap();
        assert_eq!(exec.map_chunks(100, |c| c * c), (0..100).map(|c| c * c).collect::<Vec<_>>());
    }

    #[test]
    fn matches_sequential_bit_for_bit() {
        let model = SphereModel::local_singlet(&ChshSettings::optimal_angles().map(|&t| spin_direction(t)));
        let labels = ChshSettings::default_labels();
        let n = 300_000;
        let a = hv_correlation_table_with(&Sequential, &model, &labels, n, 9).unwrap();
        for threads in [1, 3, 8] {
            let b = hv_correlation_table_with(&RayonExecutor::new(Some(threads)).unwrap(), &model, &labels, n, 9).unwrap();
            assert_eq!(a, b);
        }
    }
}
