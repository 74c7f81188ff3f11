//! Execution of the independent per-equation solves of one iteration.

use super::LddError;

/// How the per-equation solves of one iteration are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutionMode {
    Sequential,
    /// `threads == 0` uses the available hardware parallelism. Without the
    /// `parallel` feature this runs sequentially.
    Parallel {
        threads: usize,
    },
}

impl Default for ExecutionMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecutionMode::Parallel { threads: 0 }
        } else {
            ExecutionMode::Sequential
        }
    }
}

#[derive(Debug)]
pub(crate) struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub(crate) fn new(mode: ExecutionMode) -> Result<Self, LddError> {
        #[cfg(feature = "parallel")]
        {
            let pool = match mode {
                ExecutionMode::Sequential => None,
                ExecutionMode::Parallel { threads } => Some(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build()
                        .map_err(|e| LddError::ThreadPool(e.to_string()))?,
                ),
            };
            Ok(Self { pool })
        }
        #[cfg(not(feature = "parallel"))]
        {
            if let ExecutionMode::Parallel { .. } = mode {
                log::debug!("built without the `parallel` feature; solving sequentially");
            }
            Ok(Self {})
        }
    }

    /// Evaluates `f` for every index in `order` and returns the results
    /// indexed by equation, independent of scheduling.
    pub(crate) fn map<T, F>(&self, order: &[usize], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let computed: Vec<(usize, T)> = self.map_pairs(order, f);
        let mut slots: Vec<Option<T>> = (0..order.len()).map(|_| None).collect();
        for (i, v) in computed {
            slots[i] = Some(v);
        }
        slots
            .into_iter()
            .map(|v| v.expect("every equation evaluated"))
            .collect()
    }

    #[cfg(feature = "parallel")]
    fn map_pairs<T, F>(&self, order: &[usize], f: F) -> Vec<(usize, T)>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        match &self.pool {
            Some(pool) => pool.install(|| order.par_iter().map(|&i| (i, f(i))).collect()),
            None => order.iter().map(|&i| (i, f(i))).collect(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn map_pairs<T, F>(&self, order: &[usize], f: F) -> Vec<(usize, T)>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        order.iter().map(|&i| (i, f(i))).collect()
    }
}
