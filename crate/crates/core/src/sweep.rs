//! Point-wise evaluation strategies for grid sweeps.
//!
//! Every sweep in this crate is expressed as a map over `0..len`; results are
//! collected by index, so the output never depends on evaluation order. The
//! std companion crate supplies a thread-pool implementation.

use alloc::vec::Vec;

pub trait Sweep: Sync {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Evaluates points one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Sweep for Serial {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}
