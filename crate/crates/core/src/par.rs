use alloc::vec::Vec;

/// Evaluate `f` for every iteration index in `0..n`, returning results in
/// index order. Runs on the rayon pool when the `parallel` feature is on.
pub(crate) fn map_iterations<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
