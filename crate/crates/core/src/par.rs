//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these run on the rayon global pool; without it
//! they are plain iterator loops. Results never depend on scheduling: `map`
//! preserves order and `find_first_map` returns the lowest-index hit.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_range<R, F>(range: std::ops::Range<u64>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(range: std::ops::Range<u64>, f: F) -> Vec<R>
where
    F: Fn(u64) -> R,
{
    range.map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn find_first_map<T, R, F>(items: &[T], f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    items
        .par_iter()
        .enumerate()
        .filter_map(|(i, item)| f(item).map(|r| (i, r)))
        .find_first(|_| true)
}

#[cfg(not(feature = "parallel"))]
pub fn find_first_map<T, R, F>(items: &[T], f: F) -> Option<(usize, R)>
where
    F: Fn(&T) -> Option<R>,
{
    items.iter().enumerate().find_map(|(i, item)| f(item).map(|r| (i, r)))
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
