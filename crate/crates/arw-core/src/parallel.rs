//! Trial fan-out. Trials are seeded independently by index, so the output is
//! identical whether they run serially or on a thread pool.

#[cfg(feature = "parallel")]
pub fn run_trials<T, F>(trials: u64, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(body).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_trials<T, F>(trials: u64, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    (0..trials).map(body).collect()
}
