//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (on by default) and more than one worker,
//! items are processed on a dedicated rayon pool of that size. Otherwise the
//! map runs sequentially on the calling thread. Output order always matches
//! input order, so results are identical either way.

/// Number of worker threads to use for independent runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workers(usize);

impl Workers {
    pub const SEQUENTIAL: Workers = Workers(1);

    pub fn new(count: usize) -> Workers {
        Workers(count.max(1))
    }

    /// One worker per available core.
    pub fn all() -> Workers {
        Workers::new(std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn count(self) -> usize {
        self.0
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::SEQUENTIAL
    }
}

pub fn is_parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], workers: Workers, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    if workers.count() <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers.count()).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("falling back to sequential execution: {e}");
            items.iter().map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], _workers: Workers, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..100).collect();
        let seq = map(&items, Workers::SEQUENTIAL, |x| x * x);
        let par = map(&items, Workers::new(4), |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }

    #[test]
    fn zero_workers_means_one() {
        assert_eq!(Workers::new(0).count(), 1);
    }
}
