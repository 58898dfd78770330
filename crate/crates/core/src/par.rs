//! Data-parallel map with a sequential fallback.

/// How independent work items are scheduled.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Exec {
    #[default]
    Auto,
    Sequential,
}

/// Maps `f` over `items`, preserving order. Runs on the rayon pool when the
/// `parallel` feature is enabled and `exec` is `Auto`.
pub fn map<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Auto {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}
