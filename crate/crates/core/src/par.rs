//! Data-parallel helpers with a sequential twin.
//!
//! Every helper produces the same result under both [`Execution`] modes;
//! only the scheduling differs. Without the `parallel` feature the parallel
//! mode silently runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How index-range work is scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// The mode that will actually run given the compiled features.
    pub fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `0..n` through `f` and folds the results with an associative `reduce`.
pub(crate) fn map_reduce<T, F, R>(exec: Execution, n: u64, identity: T, f: F, reduce: R) -> T
where
    T: Send + Clone + Sync,
    F: Fn(u64) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n)
            .into_par_iter()
            .map(&f)
            .reduce(|| identity.clone(), &reduce),
        _ => (0..n).map(f).fold(identity, reduce),
    }
}

/// Maps `0..n` through `f`, keeping index order.
pub(crate) fn map_collect<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Lowest index in `0..n` whose chunk search succeeds.
///
/// The range is cut into chunks of `chunk` indices; `search(start, end)`
/// returns the first hit inside its chunk. The overall answer is always the
/// globally lowest hit.
pub(crate) fn find_first<F>(exec: Execution, n: u64, chunk: u64, search: F) -> Option<u64>
where
    F: Fn(u64, u64) -> Option<u64> + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = n.div_ceil(chunk);
    let bounds = move |i: u64| (i * chunk, ((i + 1) * chunk).min(n));
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..chunks).into_par_iter().find_map_first(|i| {
            let (s, e) = bounds(i);
            search(s, e)
        }),
        _ => (0..chunks).find_map(|i| {
            let (s, e) = bounds(i);
            search(s, e)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert_eq!(
                map_reduce(exec, 1000, 0u64, |i| i * i, |a, b| a + b),
                332_833_500
            );
            assert_eq!(map_collect(exec, 5, |i| i * 2), vec![0, 2, 4, 6, 8]);
            let hit = find_first(exec, 10_000, 64, |s, e| (s..e).find(|&i| i % 997 == 996));
            assert_eq!(hit, Some(996));
            assert_eq!(find_first(exec, 100, 7, |_, _| None), None);
        }
    }
}
