//! Trial-level parallelism with ordered, thread-count-independent results.

use rayon::prelude::*;

use crate::{Error, Result};

/// Runs `trial(0..count)` on `threads` workers (all cores if `None`) and
/// returns the results in trial order.
pub fn run_trials<T, F>(count: usize, threads: Option<usize>, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let run = || (0..count).into_par_iter().map(&trial).collect::<Result<Vec<T>>>();
    match threads {
        Some(0) => Err(Error::InvalidParameter("thread count must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(run),
        None => run(),
    }
}
