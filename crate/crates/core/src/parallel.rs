//! Element-loop execution. Parallel runs use a shared rayon pool whose size
//! can be capped with `CONSERVAFLUX_THREADS`.

use std::sync::OnceLock;

use rayon::prelude::*;

pub const THREADS_ENV: &str = "CONSERVAFLUX_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

pub fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        builder.build().expect("failed to build thread pool")
    })
}

/// Maps `f` over `0..n`, keeping results in index order. The first error
/// (lowest index) wins regardless of execution mode.
pub fn map_indexed<T, E, F>(n: usize, execution: Execution, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    match execution {
        Execution::Serial => (0..n).map(f).collect(),
        Execution::Parallel => {
            let results: Vec<Result<T, E>> = thread_pool().install(|| (0..n).into_par_iter().map(&f).collect());
            results.into_iter().collect()
        }
    }
}
