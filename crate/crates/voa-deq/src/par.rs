//! Data-parallel map helpers: rayon when the `parallel` feature is on,
//! a sequential fallback otherwise. Results preserve input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice, in parallel when enabled.
pub fn map_slice<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(|t| f(t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(|t| f(t)).collect()
    }
}

/// Map over owned items, in parallel when enabled.
pub fn map_vec<T: Send, U: Send, F: Fn(T) -> U + Sync + Send>(items: Vec<T>, f: F) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Configure the global worker count from `--jobs` / `VOA_DEQ_JOBS`.
/// Silently ignored (single-threaded anyway) without the `parallel` feature.
pub fn configure_jobs(jobs: Option<usize>) {
    let n = jobs.or_else(|| {
        std::env::var("VOA_DEQ_JOBS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = n {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}
