//! Data-parallel map with a sequential fallback.
//!
//! With the default `parallel` feature the heavy enumeration loops fan out
//! over a rayon pool (capped by the `FEYNCUT_THREADS` environment variable);
//! without it they run sequentially.  Either way results are merged in input
//! order, so output is deterministic and scheduler-independent.

#[cfg(feature = "parallel")]
use once_cell::sync::Lazy;

#[cfg(feature = "parallel")]
static POOL: Lazy<rayon::ThreadPool> = Lazy::new(|| {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(n) = std::env::var("FEYNCUT_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            if n > 0 {
                b = b.num_threads(n);
            }
        }
    }
    b.build().expect("rayon pool")
});

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// The output order always matches the input order.
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        POOL.install(|| items.into_par_iter().map(f).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
