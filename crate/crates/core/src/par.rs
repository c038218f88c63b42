//! Order-preserving maps over sample points, parallel when the `parallel`
//! feature is enabled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for grid loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// `Parallel` when compiled with the `parallel` feature.
    pub fn available() -> Exec {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }

    pub fn map<T, F>(self, points: &[Vec<f64>], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[f64]) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => points.par_iter().map(|p| f(p)).collect(),
            _ => points.iter().map(|p| f(p)).collect(),
        }
    }

    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_keep_order() {
        let pts: Vec<Vec<f64>> = (0..1000).map(|i| vec![i as f64]).collect();
        let a = Exec::Sequential.map(&pts, |p| p[0] * 2.0);
        let b = Exec::available().map(&pts, |p| p[0] * 2.0);
        assert_eq!(a, b);
        assert_eq!(Exec::available().map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }
}
