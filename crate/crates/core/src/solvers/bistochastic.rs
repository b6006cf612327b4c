use ndarray::Array2;

use crate::error::{Error, Result};
use crate::features::squared_attr_distances;
use crate::graph::{AttributedGraph, CompatibilityTables};

const MAX_NORMALIZATION_ITERS: usize = 100_000;
const MIN_AFFINITY: f64 = 1e-300;

/// Non-learned compatibilities after bistochastic normalization, with the
/// convergence record of the normalization loop.
#[derive(Debug, Clone)]
pub struct NormalizedCompatibilities {
    pub tables: CompatibilityTables,
    pub iterations: usize,
    pub last_change: f64,
}

/// Builds `exp(-||G_i - G'_i'||^2)` node compatibilities and alternately
/// rescales rows (to sum 1) and columns (to sum `n / n'`) until the largest
/// entrywise change between sweeps drops below `delta`.
///
/// Each row is shifted by its smallest squared distance before
/// exponentiation; a per-row factor does not change the normalized result
/// and keeps the best entry of every row away from underflow. The edge term
/// gets weight `1 / mean degree` so that a fully preserved edge structure
/// contributes on the order of `n`, like the normalized node term.
pub fn bistochastic_normalize_baseline(
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
    delta: f64,
) -> Result<NormalizedCompatibilities> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("normalization constant {delta} must be positive")));
    }
    if g.attr_dim() != g_prime.attr_dim() {
        return Err(Error::dims("attribute dimension", g.attr_dim(), g_prime.attr_dim()));
    }
    let (n, m) = (g.num_nodes(), g_prime.num_nodes());
    let d = squared_attr_distances(g, g_prime);
    let mut c = Array2::zeros((n, m));
    for i in 0..n {
        let row_min = d.row(i).iter().copied().fold(f64::INFINITY, f64::min);
        for j in 0..m {
            c[[i, j]] = (-(d[[i, j]] - row_min)).exp().max(MIN_AFFINITY);
        }
    }

    let col_target = n as f64 / m as f64;
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;
    while last_change >= delta && iterations < MAX_NORMALIZATION_ITERS {
        let prev = c.clone();
        for mut row in c.rows_mut() {
            let s = row.sum();
            row /= s;
        }
        for mut col in c.columns_mut() {
            let s = col.sum();
            col *= col_target / s;
        }
        last_change = (&c - &prev).iter().map(|v| v.abs()).fold(0.0, f64::max);
        iterations += 1;
    }

    let mean_degree = 2.0 * g.num_edges() as f64 / n.max(1) as f64;
    let edge_weight = if g.num_edges() == 0 { 0.0 } else { 1.0 / mean_degree.max(1.0) };
    Ok(NormalizedCompatibilities { tables: CompatibilityTables::new(c, edge_weight), iterations, last_change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{build_graph, ShapeContextConfig};

    #[test]
    fn output_is_nonnegative_and_balanced() {
        let pts = vec![[0.0, 0.0], [1.0, 0.2], [0.4, 1.1], [1.3, 1.4], [0.7, 0.6]];
        let g = build_graph(&pts, &ShapeContextConfig::default(), true).unwrap();
        let out = bistochastic_normalize_baseline(&g, &g, 1e-5).unwrap();
        assert!(out.last_change < 1e-5);
        assert!(out.tables.c.iter().all(|&v| v >= 0.0));
        for r in out.tables.c.rows() {
            assert!((r.sum() - 1.0).abs() < 1e-4);
        }
        assert!(out.tables.edge_weight > 0.0);
    }

    #[test]
    fn rejects_bad_delta() {
        let pts = vec![[0.0, 0.0], [1.0, 0.2], [0.4, 1.1]];
        let g = build_graph(&pts, &ShapeContextConfig::default(), true).unwrap();
        assert!(bistochastic_normalize_baseline(&g, &g, 0.0).is_err());
    }
}
