//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! the rayon pool; without it, or under [`ExecutionPolicy::Sequential`], it
//! runs in order on the calling thread. Results are returned in input order
//! either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecutionPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecutionPolicy {
    /// The policy actually used: `Parallel` degrades to `Sequential` when the
    /// crate is built without the `parallel` feature.
    pub fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            ExecutionPolicy::Sequential
        }
    }
}

pub fn map<T, R, F>(policy: ExecutionPolicy, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match policy.effective() {
        #[cfg(feature = "parallel")]
        ExecutionPolicy::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn map_range<R, F>(policy: ExecutionPolicy, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match policy.effective() {
        #[cfg(feature = "parallel")]
        ExecutionPolicy::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}
