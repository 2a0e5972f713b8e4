//! Execution-mode switch: data-parallel map via rayon, or sequential.
//!
//! All parallel sites collect results in input order and reduce
//! sequentially afterwards, so both modes produce identical output for
//! identical seeds.

/// How independent work items are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Order-preserving map over an index range.
pub fn map_indexed<T, F>(mode: ExecMode, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..count).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_map_preserves_order() {
        let out = map_indexed(ExecMode::Sequential, 5, |i| i * i);
        assert_eq!(out, vec![0, 1, 4, 9, 16]);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_map_matches_sequential() {
        let seq = map_indexed(ExecMode::Sequential, 1000, |i| (i as f64).sqrt());
        let par = map_indexed(ExecMode::Parallel, 1000, |i| (i as f64).sqrt());
        assert_eq!(seq, par);
    }
}
