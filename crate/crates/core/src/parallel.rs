//! Data-parallel helpers with a sequential fallback.
//!
//! The `parallel` feature (on by default) routes batch work through rayon;
//! without it the same entry points run sequentially. The explicit `_seq`
//! variants always run sequentially so benchmarks can compare both paths.

/// Maps `f` over the index range, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<U: Send>(count: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U: Send>(count: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    map_indexed_seq(count, f)
}

/// Sequential reference path, independent of the feature flag.
pub fn map_indexed_seq<U: Send>(count: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    (0..count).map(f).collect()
}

/// Maps `f` over a slice, in parallel when enabled.
#[cfg(feature = "parallel")]
pub fn map_slice<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    map_slice_seq(items, f)
}

pub fn map_slice_seq<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Caps the rayon thread pool; callers pass a thread-count env override.
/// No-op (and `Err`-free) when the sequential fallback is compiled in or the
/// global pool is already initialized.
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |i: usize| i * i + 1;
        assert_eq!(map_indexed(100, f), map_indexed_seq(100, f));
        let items: Vec<u32> = (0..50).collect();
        let g = |x: &u32| x + 7;
        assert_eq!(map_slice(&items, g), map_slice_seq(&items, g));
    }
}
