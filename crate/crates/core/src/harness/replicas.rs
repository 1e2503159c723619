//! Independent replicas run on scoped threads.

use std::thread;

use crate::error::Result;

/// Runs `f(seed)` for every seed concurrently; results keep the seed order.
pub fn run_replicas<T, F>(seeds: &[u64], f: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = seeds.iter().map(|&seed| s.spawn(move || f(seed))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}
