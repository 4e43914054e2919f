//! Deterministic work distribution for replicated Monte Carlo.
//!
//! Replicate indices are partitioned into fixed-size blocks whose boundaries
//! depend only on the sample count, never on the worker count. Workers claim
//! blocks through an atomic cursor, and per-block partial results are merged
//! in block order afterwards, so the final result is bit-identical for any
//! number of workers.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

/// Block size as a pure function of the workload.
pub fn block_size(n_items: u64) -> u64 {
    (n_items / 64).clamp(1, 8192)
}

/// Effective worker count: explicit request, or available parallelism.
pub fn effective_workers(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

/// Run `work` over every block of `0..n_items` and return the per-block
/// results in block order.
pub fn run_blocks<P, F>(n_items: u64, workers: usize, work: F) -> Vec<P>
where
    P: Send,
    F: Fn(Range<u64>) -> P + Sync,
{
    if n_items == 0 {
        return Vec::new();
    }
    let bs = block_size(n_items);
    let n_blocks = n_items.div_ceil(bs) as usize;
    let workers = effective_workers(workers).min(n_blocks);

    if workers <= 1 {
        return (0..n_blocks as u64)
            .map(|b| work(b * bs..((b + 1) * bs).min(n_items)))
            .collect();
    }

    let cursor = AtomicU64::new(0);
    let slots: Vec<Mutex<Option<P>>> = (0..n_blocks).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let b = cursor.fetch_add(1, Ordering::Relaxed);
                if b >= n_blocks as u64 {
                    break;
                }
                let range = b * bs..((b + 1) * bs).min(n_items);
                let partial = work(range);
                *slots[b as usize].lock().expect("block slot") = Some(partial);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("block slot").expect("block computed"))
        .collect()
}
