//! Chunked execution with a rayon backend and a sequential fallback.
//!
//! Work is always split into the same fixed chunks, so the output of a
//! chunked map depends only on the chunk count and never on how many
//! threads ran it.

/// How chunked work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Run chunks on the current rayon pool (sequential when the
    /// `parallel` feature is disabled).
    #[default]
    Parallel,
    /// Run chunks one after another on the calling thread.
    Sequential,
}

impl Execution {
    /// Maps `f` over `0..chunks` and returns results in chunk order.
    pub fn map_chunks<T, F>(self, chunks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..chunks).map(f).collect(),
            Execution::Parallel => parallel_map(chunks, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(chunks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..chunks).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(chunks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..chunks).map(f).collect()
}

/// Runs `op` on a pool with `workers` threads. Without the `parallel`
/// feature this simply calls `op`.
pub fn with_workers<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
        {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        op()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let par = Execution::Parallel.map_chunks(100, |i| i * i);
        let seq = Execution::Sequential.map_chunks(100, |i| i * i);
        assert_eq!(par, seq);
        assert_eq!(par[7], 49);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let a = with_workers(1, || Execution::Parallel.map_chunks(33, |i| i as f64 * 0.5));
        let b = with_workers(4, || Execution::Parallel.map_chunks(33, |i| i as f64 * 0.5));
        assert_eq!(a, b);
    }
}
