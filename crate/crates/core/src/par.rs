//! Data-parallel execution with a sequential fallback.
//!
//! With the `parallel` feature (on by default) work items are scheduled on the
//! rayon global pool. Without it, or after [`force_sequential`]`(true)`, the
//! same closures run in a plain loop. Results are always collected in index
//! order and chunk boundaries are fixed, so both paths produce bit-identical
//! output.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::numeric::NeumaierSum;

/// Fixed chunk length for reductions over samples.
pub const CHUNK: usize = 4096;

static SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Routes all library work through the sequential path (process-wide).
pub fn force_sequential(on: bool) {
    SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !SEQUENTIAL.load(Ordering::Relaxed)
}

/// Evaluates `f(i)` for `i in 0..len`, returning results in index order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

/// Splits `0..len` into consecutive ranges of at most `chunk` and maps each.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = len.div_ceil(chunk);
    map_indexed(count, |c| {
        let start = c * chunk;
        f(start..(start + chunk).min(len))
    })
}

/// Compensated sum of `term(i)` over `0..len`, independent of scheduling.
pub fn sum_by<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let partials = map_chunks(len, CHUNK, |r| r.map(&term).collect::<NeumaierSum>());
    let mut total = NeumaierSum::new();
    for p in &partials {
        total.merge(p);
    }
    total.value()
}

/// Like [`sum_by`] for two simultaneous terms.
pub fn sum2_by<F>(len: usize, term: F) -> (f64, f64)
where
    F: Fn(usize) -> (f64, f64) + Sync + Send,
{
    let partials = map_chunks(len, CHUNK, |r| {
        let mut a = NeumaierSum::new();
        let mut b = NeumaierSum::new();
        for i in r {
            let (x, y) = term(i);
            a.add(x);
            b.add(y);
        }
        (a, b)
    });
    let mut a = NeumaierSum::new();
    let mut b = NeumaierSum::new();
    for (pa, pb) in &partials {
        a.merge(pa);
        b.merge(pb);
    }
    (a.value(), b.value())
}

/// Counts indices in `0..len` satisfying `pred`.
pub fn count_by<F>(len: usize, pred: F) -> usize
where
    F: Fn(usize) -> bool + Sync + Send,
{
    map_chunks(len, CHUNK, |r| r.filter(|&i| pred(i)).count())
        .into_iter()
        .sum()
}
