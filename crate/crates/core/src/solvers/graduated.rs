use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};

use super::lap::linear_assignment;
use super::sinkhorn::sinkhorn;
use crate::error::{Error, Result};
use crate::graph::{edge_contraction, AttributedGraph, CompatibilityTables, Matching};

// exp(-700) is still a normal f64.
const MIN_EXPONENT: f64 = -700.0;

/// Annealing schedule for graduated assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraduatedAssignmentConfig {
    pub beta0: f64,
    pub beta_rate: f64,
    pub beta_max: f64,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iters: usize,
    pub outer_iters_per_beta: usize,
}

impl Default for GraduatedAssignmentConfig {
    fn default() -> Self {
        Self {
            beta0: 0.5,
            beta_rate: 1.075,
            beta_max: 10.0,
            sinkhorn_tol: 1e-6,
            sinkhorn_max_iters: 300,
            outer_iters_per_beta: 4,
        }
    }
}

impl GraduatedAssignmentConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.beta0 > 0.0
            && self.beta0 < self.beta_max
            && self.beta_rate > 1.0
            && self.sinkhorn_tol > 0.0
            && self.beta_max.is_finite();
        if !ok {
            return Err(Error::InvalidArgument(format!("invalid graduated assignment schedule {self:?}")));
        }
        Ok(())
    }
}

/// Soft assignment left at the end of the annealing schedule.
#[derive(Debug, Clone)]
pub struct SoftAssignment {
    pub y: Array2<f64>,
    pub beta_steps: usize,
    /// Worst Sinkhorn deviation seen over the run.
    pub worst_deviation: f64,
}

/// Runs the annealing schedule and returns the final soft assignment
/// (rows are query nodes, columns target nodes).
pub fn graduated_assignment_soft(
    tables: &CompatibilityTables,
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
    cfg: &GraduatedAssignmentConfig,
) -> Result<SoftAssignment> {
    cfg.validate()?;
    let (n, m) = (g.num_nodes(), g_prime.num_nodes());
    if tables.c.dim() != (n, m) {
        return Err(Error::dims(
            "compatibility table shape",
            format!("{n}x{m}"),
            format!("{}x{}", tables.c.nrows(), tables.c.ncols()),
        ));
    }
    if n > m {
        return Err(Error::InvalidArgument(format!("graduated assignment needs query <= target size, got {n} > {m}")));
    }
    let mut y = Array2::from_elem((n, m), 1.0 / m as f64);
    // Slack rows pad the matrix to m x m; their (constant) value is absorbed
    // by Sinkhorn's row scaling.
    let mut padded = Array2::<f64>::ones((m, m));
    let mut beta = cfg.beta0;
    let mut beta_steps = 0;
    let mut worst_deviation = 0.0f64;
    while beta <= cfg.beta_max {
        for _ in 0..cfg.outer_iters_per_beta {
            let mut q = tables.c.clone();
            if tables.edge_weight != 0.0 {
                q.scaled_add(2.0 * tables.edge_weight, &edge_contraction(g, g_prime, y.view()));
            }
            if q.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical("non-finite assignment gradient".into()));
            }
            let q_max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            padded.slice_mut(s![..n, ..]).assign(&q.mapv(|v| (beta * (v - q_max)).max(MIN_EXPONENT).exp()));
            padded.slice_mut(s![n.., ..]).fill(1.0);
            let balanced = sinkhorn(padded.clone(), cfg.sinkhorn_tol, cfg.sinkhorn_max_iters)?;
            worst_deviation = worst_deviation.max(balanced.deviation);
            y.assign(&balanced.m.slice(s![..n, ..]));
        }
        beta *= cfg.beta_rate;
        beta_steps += 1;
    }
    Ok(SoftAssignment { y, beta_steps, worst_deviation })
}

/// Graduated assignment for the quadratic-assignment objective; the soft
/// result is projected onto a matching with an exact linear assignment.
pub fn graduated_assignment(
    tables: &CompatibilityTables,
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
    cfg: &GraduatedAssignmentConfig,
) -> Result<Matching> {
    let soft = graduated_assignment_soft(tables, g, g_prime, cfg)?;
    linear_assignment(soft.y.view())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edgeless(n: usize) -> AttributedGraph {
        let pts = (0..n).map(|i| [i as f64, (i * i) as f64]).collect();
        AttributedGraph::without_edges(pts, Array2::zeros((n, 1))).unwrap()
    }

    #[test]
    fn diagonal_linear_problem_gives_identity() {
        let g = edgeless(5);
        let t = CompatibilityTables::linear(Array2::eye(5) * 3.0);
        let y = graduated_assignment(&t, &g, &g, &GraduatedAssignmentConfig::default()).unwrap();
        assert_eq!(y, Matching::identity(5));
    }

    #[test]
    fn rectangular_output_is_valid() {
        let g = edgeless(3);
        let gp = edgeless(5);
        let mut c = Array2::zeros((3, 5));
        c[[0, 4]] = 2.0;
        c[[1, 2]] = 2.0;
        c[[2, 0]] = 2.0;
        let y = graduated_assignment(&CompatibilityTables::linear(c), &g, &gp, &Default::default()).unwrap();
        assert_eq!(y.as_slice(), &[4, 2, 0]);
    }

    #[test]
    fn schedule_validation() {
        let cfg = GraduatedAssignmentConfig { beta_rate: 1.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = GraduatedAssignmentConfig { beta0: 20.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        let g = edgeless(2);
        let mut c = Array2::zeros((2, 2));
        c[[0, 0]] = f64::INFINITY;
        let r = graduated_assignment(&CompatibilityTables::linear(c), &g, &g, &Default::default());
        assert!(matches!(r, Err(Error::Numerical(_))));
    }
}
