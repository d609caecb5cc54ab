//! Order-preserving batch evaluation.
//!
//! Verification sweeps apply one pure function to many independent
//! inputs (seeded deformation functions, sample points, parameter
//! triples). [`map`] fans the work out on the rayon pool when the
//! `parallel` feature is enabled (the default) and degrades to a
//! plain sequential loop without it; [`map_seq`] is always
//! sequential, kept as the benchmark baseline. Output order matches
//! input order in every configuration.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
