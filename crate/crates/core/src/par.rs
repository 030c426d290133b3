//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature, [`Strategy::Parallel`] runs on the rayon
//! pool; without it every strategy runs sequentially. Results always come
//! back in input order, so callers see identical output either way.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Parallel,
    Sequential,
}

impl Strategy {
    /// Whether this strategy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

pub fn map<T, R, F>(strategy: Strategy, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy == Strategy::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let sq = |x: &u64| x * x;
        assert_eq!(map(Strategy::Parallel, &xs, sq), map(Strategy::Sequential, &xs, sq));
        assert_eq!(map(Strategy::Parallel, &xs, sq)[999], 998001);
    }
}
