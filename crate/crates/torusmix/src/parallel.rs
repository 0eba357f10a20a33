//! Data-parallel ensemble mapping with a sequential fallback.
//!
//! With the `parallel` feature (default) independent tasks run on a rayon
//! pool; without it the same closure runs in a plain loop. Results are
//! returned in index order either way, and all reductions downstream happen
//! in that fixed order, so outputs are byte-identical for any worker count.

/// Maps `f` over `0..n`, returning results in index order.
///
/// `workers = None` uses the default pool size; `Some(w)` pins the pool to
/// `w` threads. `Some(1)` and the sequential fallback take the same code
/// path.
pub fn map_indexed<T, F>(n: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if workers != Some(1) {
            return map_indexed_parallel(n, workers, f);
        }
    }
    map_indexed_sequential(n, f)
}

/// Plain sequential loop; the fallback body used when `parallel` is disabled.
pub fn map_indexed_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indexed_parallel<T, F>(n: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect();
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

/// Execution mode recorded in run manifests.
pub fn execution_mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "rayon"
    } else {
        "sequential"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_in_index_order_for_any_worker_count() {
        let expected: Vec<usize> = (0..97).map(|i| i * i).collect();
        for workers in [None, Some(1), Some(4), Some(8)] {
            let got = map_indexed(97, workers, |i| i * i);
            assert_eq!(got, expected);
        }
        assert_eq!(map_indexed_sequential(97, |i| i * i), expected);
    }
}
