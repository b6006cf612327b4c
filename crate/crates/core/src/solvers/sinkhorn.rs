use ndarray::{Array2, Axis};

use crate::error::{Error, Result};

/// Result of Sinkhorn balancing.
#[derive(Debug, Clone)]
pub struct DoublyStochasticMatrix {
    pub m: Array2<f64>,
    pub iterations: usize,
    /// Largest `|sum - 1|` over rows and columns at exit.
    pub deviation: f64,
}

pub fn stochastic_deviation(m: &Array2<f64>) -> f64 {
    let rows = m.sum_axis(Axis(1));
    let cols = m.sum_axis(Axis(0));
    rows.iter().chain(cols.iter()).map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
}

/// Alternating row/column normalization of a strictly positive square
/// matrix until every row and column sum is within `tol` of one.
pub fn sinkhorn(m: Array2<f64>, tol: f64, max_iters: usize) -> Result<DoublyStochasticMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!("sinkhorn needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if let Some(v) = m.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("sinkhorn entry {v} is not strictly positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("sinkhorn tolerance must be positive".into()));
    }
    let n = m.nrows();
    let mut m = m.as_standard_layout().into_owned();
    let a = m.as_slice_mut().expect("standard layout");
    let mut rows = vec![0.0; n];
    let mut cols = vec![0.0; n];
    let sums = |a: &[f64], rows: &mut [f64], cols: &mut [f64]| {
        cols.fill(0.0);
        for (row, r) in a.chunks_exact(n).zip(rows.iter_mut()) {
            *r = row.iter().sum();
            for (c, v) in cols.iter_mut().zip(row) {
                *c += v;
            }
        }
        rows.iter().chain(cols.iter()).map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    };
    let mut deviation = sums(a, &mut rows, &mut cols);
    let mut iterations = 0;
    while deviation >= tol && iterations < max_iters {
        cols.fill(0.0);
        for (row, r) in a.chunks_exact_mut(n).zip(&rows) {
            let inv = 1.0 / r;
            for (v, c) in row.iter_mut().zip(cols.iter_mut()) {
                *v *= inv;
                *c += *v;
            }
        }
        for c in cols.iter_mut() {
            *c = 1.0 / *c;
        }
        for row in a.chunks_exact_mut(n) {
            for (v, c) in row.iter_mut().zip(&cols) {
                *v *= c;
            }
        }
        iterations += 1;
        deviation = sums(a, &mut rows, &mut cols);
    }
    Ok(DoublyStochasticMatrix { m, iterations, deviation })
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    #[test]
    fn fixed_point_is_untouched() {
        let m = array![[0.25, 0.75], [0.75, 0.25]];
        let out = sinkhorn(m.clone(), 1e-9, 100).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.deviation, 0.0);
        assert_eq!(out.m, m);
    }

    #[test]
    fn all_ones_becomes_uniform() {
        let out = sinkhorn(Array2::ones((4, 4)), 1e-12, 10).unwrap();
        assert!(out.m.iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn rejects_nonpositive_and_rectangular() {
        assert!(sinkhorn(array![[1.0, 0.0], [1.0, 1.0]], 1e-6, 10).is_err());
        assert!(sinkhorn(array![[1.0, -1.0], [1.0, 1.0]], 1e-6, 10).is_err());
        assert!(sinkhorn(Array2::ones((2, 3)), 1e-6, 10).is_err());
    }

    #[test]
    fn reports_non_convergence_without_error() {
        let m = array![[1.0, 1e-12], [1e-12, 1e-12]];
        let out = sinkhorn(m, 1e-14, 2).unwrap();
        assert_eq!(out.iterations, 2);
        assert!(out.deviation > 1e-14);
    }
}
