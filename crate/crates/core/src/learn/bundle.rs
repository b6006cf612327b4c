//! Master problem of the bundle method:
//!
//! `min_w (lambda/2) ||w||^2 + max_t (<a_t, w> + b_t)`
//!
//! solved through its dual over the simplex,
//! `max_alpha  b^T alpha - (1/(2 lambda)) alpha^T G alpha`, `G_ts = <a_t, a_s>`,
//! with `w = -(1/lambda) sum_t alpha_t a_t`. The dual is optimized by
//! pairwise coordinate steps; the duality gap `max_t g_t - alpha^T g`
//! (with `g = b - G alpha / lambda`) is the stopping rule.

use serde::{Deserialize, Serialize};

/// A linear lower bound `<gradient, w> + offset` on the empirical risk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuttingPlane {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

impl CuttingPlane {
    pub fn value_at(&self, w: &[f64]) -> f64 {
        dot(&self.gradient, w) + self.offset
    }
}

#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub w: Vec<f64>,
    /// Dual objective; a lower bound on the master minimum.
    pub lower_bound: f64,
    /// Master primal objective at `w`.
    pub primal: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct BundleMaster {
    lambda: f64,
    dim: usize,
    planes: Vec<CuttingPlane>,
    gram: Vec<Vec<f64>>,
    alpha: Vec<f64>,
}

pub const MASTER_TOLERANCE: f64 = 1e-8;
const MAX_MASTER_STEPS: usize = 200_000;

impl BundleMaster {
    pub fn new(lambda: f64, dim: usize) -> Self {
        Self { lambda, dim, planes: Vec::new(), gram: Vec::new(), alpha: Vec::new() }
    }

    pub fn planes(&self) -> &[CuttingPlane] {
        &self.planes
    }

    pub fn add_plane(&mut self, plane: CuttingPlane) {
        assert_eq!(plane.gradient.len(), self.dim, "plane dimension");
        let row: Vec<f64> = self.planes.iter().map(|p| dot(&p.gradient, &plane.gradient)).collect();
        for (r, v) in self.gram.iter_mut().zip(&row) {
            r.push(*v);
        }
        let mut row = row;
        row.push(dot(&plane.gradient, &plane.gradient));
        self.gram.push(row);
        self.planes.push(plane);
        if self.alpha.is_empty() {
            self.alpha.push(1.0);
        } else {
            self.alpha.push(0.0);
        }
    }

    fn primal_w(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim];
        for (a, p) in self.alpha.iter().zip(&self.planes) {
            if *a != 0.0 {
                for (wk, gk) in w.iter_mut().zip(&p.gradient) {
                    *wk -= a * gk / self.lambda;
                }
            }
        }
        w
    }

    /// Optimizes the dual to gap `MASTER_TOLERANCE * max(1, |primal|)`.
    pub fn solve(&mut self) -> MasterSolution {
        assert!(!self.planes.is_empty(), "master problem without planes");
        let t = self.planes.len();
        let lambda = self.lambda;
        let mut g: Vec<f64> = (0..t)
            .map(|s| {
                let ga: f64 = (0..t).map(|r| self.gram[s][r] * self.alpha[r]).sum();
                self.planes[s].offset - ga / lambda
            })
            .collect();

        let mut steps = 0;
        loop {
            let (i, gmax) = argmax(&g);
            let ag: f64 = self.alpha.iter().zip(&g).map(|(a, gv)| a * gv).sum();
            let gap = gmax - ag;
            let scale = ag.abs().max(gmax.abs()).max(1.0);
            if gap <= MASTER_TOLERANCE * scale || steps >= MAX_MASTER_STEPS {
                break;
            }
            // Most negative gradient among planes carrying weight.
            let j = (0..t)
                .filter(|&k| self.alpha[k] > 0.0 && k != i)
                .min_by(|&a, &b| g[a].total_cmp(&g[b]))
                .expect("some other plane has weight when the gap is positive");
            let slope = g[i] - g[j];
            let curvature = (self.gram[i][i] + self.gram[j][j] - 2.0 * self.gram[i][j]) / lambda;
            let step = if curvature > 0.0 { (slope / curvature).min(self.alpha[j]) } else { self.alpha[j] };
            if step <= 0.0 {
                break;
            }
            self.alpha[i] += step;
            self.alpha[j] -= step;
            if self.alpha[j] < 1e-15 {
                self.alpha[i] += self.alpha[j];
                self.alpha[j] = 0.0;
            }
            for (s, gs) in g.iter_mut().enumerate() {
                *gs -= step * (self.gram[s][i] - self.gram[s][j]) / lambda;
            }
            steps += 1;
        }

        let w = self.primal_w();
        let norm_sq = dot(&w, &w);
        let max_plane = self.planes.iter().map(|p| p.value_at(&w)).fold(f64::NEG_INFINITY, f64::max);
        let dual: f64 =
            self.alpha.iter().zip(&self.planes).map(|(a, p)| a * p.offset).sum::<f64>() - 0.5 * lambda * norm_sq;
        MasterSolution { w, lower_bound: dual, primal: 0.5 * lambda * norm_sq + max_plane, steps }
    }
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |best, (k, x)| if x > best.1 { (k, x) } else { best })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_plane_closed_form() {
        // min 0.5 * 2 * w^2 + (3 w + 1)  =>  w = -1.5, value = 2.25 - 4.5 + 1
        let mut m = BundleMaster::new(2.0, 1);
        m.add_plane(CuttingPlane { gradient: vec![3.0], offset: 1.0 });
        let s = m.solve();
        assert!((s.w[0] + 1.5).abs() < 1e-12);
        assert!((s.lower_bound - (-1.25)).abs() < 1e-12);
        assert!((s.primal - s.lower_bound).abs() < 1e-12);
    }

    #[test]
    fn hinge_of_two_planes() {
        // max(w, -w) + 0.5 w^2 is minimized at w = 0 with value 0.
        let mut m = BundleMaster::new(1.0, 1);
        m.add_plane(CuttingPlane { gradient: vec![1.0], offset: 0.0 });
        m.add_plane(CuttingPlane { gradient: vec![-1.0], offset: 0.0 });
        let s = m.solve();
        assert!(s.w[0].abs() < 1e-8);
        assert!(s.lower_bound.abs() < 1e-8);
    }

    #[test]
    fn lower_bound_below_primal_on_random_bundle() {
        let mut m = BundleMaster::new(0.3, 4);
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..12 {
            let gradient = (0..4).map(|_| next()).collect();
            m.add_plane(CuttingPlane { gradient, offset: next() });
            let s = m.solve();
            assert!(s.lower_bound <= s.primal + 1e-12);
            assert!(s.primal - s.lower_bound <= 1e-7);
        }
    }
}
