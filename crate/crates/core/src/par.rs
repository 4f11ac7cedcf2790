//! Data-parallel helpers with a sequential fallback.
//!
//! Without the `parallel` feature every mode runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Sequential,
    Parallel,
}

impl Mode {
    pub fn from_jobs(jobs: usize) -> Mode {
        if jobs > 1 {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

/// `f(0), …, f(n-1)` in index order.
pub fn map_range<T, F>(n: usize, mode: Mode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Mode::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// `f` over a slice, results in slice order.
pub fn map_slice<'a, S, T, F>(items: &'a [S], mode: Mode, f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    map_range(items.len(), mode, |i| f(&items[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_range(100, Mode::Sequential, |i| i * i);
        let b = map_range(100, Mode::Parallel, |i| i * i);
        assert_eq!(a, b);
        assert_eq!(map_slice(&[1, 2, 3], Mode::Parallel, |x| x + 1), vec![2, 3, 4]);
    }
}
