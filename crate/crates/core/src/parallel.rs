//! Worker-count control.
//!
//! All parallel loops in this crate write into pre-assigned slots and reduce
//! sequentially in index order, so the thread count never changes a result.

use std::env;

/// Environment variable consulted when no explicit worker count is given.
pub const WORKERS_ENV: &str = "ROBDCOR_WORKERS";

/// Resolve the worker count: explicit value, then `ROBDCOR_WORKERS`, then the
/// rayon default.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| {
            env::var(WORKERS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
        })
        .filter(|&w| w > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Run `f` inside a rayon pool with exactly `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_count_wins() {
        assert_eq!(resolve_workers(Some(3)), 3);
    }

    #[test]
    fn pool_has_requested_size() {
        let n = with_workers(2, rayon::current_num_threads);
        assert_eq!(n, 2);
    }
}
