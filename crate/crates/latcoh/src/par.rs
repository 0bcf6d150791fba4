//! Data-parallel helpers. With the `parallel` feature (default) the work is
//! spread over a rayon pool; without it the sequential fallbacks run. Both
//! code paths produce bitwise-identical results: reductions are ordered.

/// Map over an index range and collect in order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Sequential twin of `map_indexed`, kept callable for benchmarks.
pub fn map_indexed_seq<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Fold every index into a summable value.
#[cfg(feature = "parallel")]
pub fn sum_indexed<T, F>(n: usize, f: F) -> T
where
    T: Send + std::iter::Sum<T>,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    // chunked ordered reduction keeps the result deterministic
    (0..n).into_par_iter().map(f).collect::<Vec<_>>().into_iter().sum()
}

#[cfg(not(feature = "parallel"))]
pub fn sum_indexed<T, F>(n: usize, f: F) -> T
where
    T: std::iter::Sum<T>,
    F: Fn(usize) -> T,
{
    (0..n).map(f).sum()
}

/// Sequential twin of `sum_indexed`, kept callable for benchmarks.
pub fn sum_indexed_seq<T, F>(n: usize, f: F) -> T
where
    T: std::iter::Sum<T>,
    F: Fn(usize) -> T,
{
    (0..n).map(f).sum()
}
