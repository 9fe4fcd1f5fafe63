//! Execution strategy for independent work items.
//!
//! The box sweeps in this crate (parameter enumeration, oracle grids) are
//! embarrassingly parallel. `flat_map` partitions them across the rayon
//! pool when the `parallel` feature is on and falls back to a plain
//! sequential loop otherwise. The per-item result vectors are concatenated
//! in input order in both modes, so callers see identical output.

/// Order-preserving flat map over independent work items.
pub fn flat_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send + Sync,
    U: Send,
    F: Fn(&T) -> Vec<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let per_item: Vec<Vec<U>> = items.par_iter().map(&f).collect();
        per_item.into_iter().flatten().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().flat_map(&f).collect()
    }
}
