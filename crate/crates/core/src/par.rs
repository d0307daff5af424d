//! Data-parallel helpers: rayon with the `parallel` feature, plain iterators
//! otherwise. Results are always returned in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn flat_map<U, F>(range: std::ops::Range<usize>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> Vec<U> + Sync + Send,
{
    range.into_par_iter().flat_map_iter(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn flat_map<U, F>(range: std::ops::Range<usize>, f: F) -> Vec<U>
where
    F: Fn(usize) -> Vec<U>,
{
    range.flat_map(f).collect()
}

/// Smallest index whose item satisfies `f`, with its value.
#[cfg(feature = "parallel")]
pub fn find_first<T, U, F>(items: &[T], f: F) -> Option<(usize, U)>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Option<U> + Sync + Send,
{
    items.par_iter().enumerate().filter_map(|(i, x)| f(x).map(|u| (i, u))).find_first(|_| true)
}

#[cfg(not(feature = "parallel"))]
pub fn find_first<T, U, F>(items: &[T], f: F) -> Option<(usize, U)>
where
    F: Fn(&T) -> Option<U>,
{
    items.iter().enumerate().find_map(|(i, x)| f(x).map(|u| (i, u)))
}

/// Whether `f` holds for every item.
#[cfg(feature = "parallel")]
pub fn all<T, F>(items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    items.par_iter().all(f)
}

#[cfg(not(feature = "parallel"))]
pub fn all<T, F>(items: &[T], f: F) -> bool
where
    F: Fn(&T) -> bool,
{
    items.iter().all(f)
}

/// Number of worker threads in use.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
