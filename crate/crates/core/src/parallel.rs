//! Data-parallel map helpers. With the `parallel` feature (default) the
//! feature-dispatched variant fans out on rayon; otherwise it is the
//! sequential loop. Results are collected in input order either way, so
//! outputs are deterministic and independent of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn maybe_par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
#[cfg(not(feature = "parallel"))]
pub fn maybe_par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Always-sequential map; the fallback path, kept callable so benchmarks can
/// compare it against the dispatched one.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let xs: Vec<i64> = (0..100).collect();
        let a = maybe_par_map(&xs, |x| x * x);
        let b = seq_map(&xs, |x| x * x);
        assert_eq!(a, b);
    }
}
