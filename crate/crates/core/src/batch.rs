//! Batch evaluation of independent checks.
//!
//! With the `parallel` feature (on by default) batches run on the rayon
//! global pool; without it they run in order on the calling thread. Results
//! are always returned in input order, so reports assembled from them do not
//! depend on scheduling.

/// Evaluates `f(0), …, f(count - 1)` in order on the calling thread.
pub fn run_sequential<R, F>(count: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..count).map(f).collect()
}

/// Evaluates `f(0), …, f(count - 1)` on the rayon pool, results in index order.
#[cfg(feature = "parallel")]
pub fn run_parallel<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn run<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        run_parallel(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sequential(count, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = run_sequential(100, |i| i * i);
        assert_eq!(run(100, |i| i * i), seq);
    }
}
