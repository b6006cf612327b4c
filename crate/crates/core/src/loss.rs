//! Losses between a predicted and a ground-truth matching.
//!
//! Both losses decompose over individual assignments: `Delta(y) = sum
//! y_{ii'} L_{ii'} + constant`. [`assignment_loss_table`] exposes that
//! decomposition, which is what keeps loss-augmented inference an
//! assignment problem.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Matching, Point, TrainingInstance};

/// Endpoint-error settings. With `literal` set the loss is reported as
/// `1 - mean(...)`, the form in which the formula is sometimes printed; the
/// default reports the mean itself, which is small for close matches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointLoss {
    pub sigma: f64,
    #[serde(default = "default_true")]
    pub clamp: bool,
    #[serde(default)]
    pub literal: bool,
}

fn default_true() -> bool {
    true
}

impl EndpointLoss {
    pub fn new(sigma: f64) -> Result<Self> {
        let e = Self { sigma, clamp: true, literal: false };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("endpoint sigma {} must be positive", self.sigma)));
        }
        Ok(())
    }

    fn term(&self, dist: f64) -> f64 {
        let r = dist / self.sigma;
        if self.clamp {
            r.min(1.0)
        } else {
            r
        }
    }
}

/// Which loss drives training and evaluation. For `Endpoint` the sigma
/// stored here is a default; instances carry their own scene width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    Hamming,
    Endpoint(EndpointLoss),
}

impl LossKind {
    /// Loss of `y` against the instance's ground truth.
    pub fn evaluate(&self, instance: &TrainingInstance, y: &Matching) -> Result<f64> {
        match self {
            LossKind::Hamming => hamming_loss(y, &instance.y_true),
            LossKind::Endpoint(e) => {
                let params = EndpointLoss { sigma: instance.scene_width, ..*e };
                let truth = true_positions(instance);
                endpoint_loss_with(y, &truth, instance.g_prime.points(), &params)
            }
        }
    }
}

/// Target-graph position that each query node should map to.
pub fn true_positions(instance: &TrainingInstance) -> Vec<Point> {
    let pts = instance.g_prime.points();
    instance.y_true.pairs().map(|(_, ip)| pts[ip]).collect()
}

/// Normalized Hamming loss `1 - <y, y^n> / ||y^n||_F^2`.
pub fn hamming_loss(y: &Matching, y_true: &Matching) -> Result<f64> {
    y.check_shape(y_true.rows(), y_true.cols())?;
    let n = y_true.rows();
    if n == 0 {
        return Ok(0.0);
    }
    let agree = y.pairs().filter(|&(i, ip)| y_true.target(i) == ip).count();
    Ok(1.0 - agree as f64 / n as f64)
}

/// Mean over query nodes of `min(d / sigma, 1)`, where `d` is the distance
/// between the chosen target point and the true position.
pub fn endpoint_loss(y: &Matching, true_positions: &[Point], target_points: &[Point], sigma: f64) -> Result<f64> {
    endpoint_loss_with(y, true_positions, target_points, &EndpointLoss::new(sigma)?)
}

pub fn endpoint_loss_with(
    y: &Matching,
    true_positions: &[Point],
    target_points: &[Point],
    params: &EndpointLoss,
) -> Result<f64> {
    params.validate()?;
    if true_positions.len() != y.rows() {
        return Err(Error::dims("true positions", y.rows(), true_positions.len()));
    }
    if target_points.len() != y.cols() {
        return Err(Error::dims("target points", y.cols(), target_points.len()));
    }
    if y.rows() == 0 {
        return Ok(0.0);
    }
    let total: f64 = y.pairs().map(|(i, ip)| params.term(dist(target_points[ip], true_positions[i]))).sum();
    let mean = total / y.rows() as f64;
    Ok(if params.literal { 1.0 - mean } else { mean })
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Per-assignment loss table `L` and constant `k` with
/// `Delta(y, y^n) = sum_{ii'} y_{ii'} L_{ii'} + k` for every matching `y`.
pub fn assignment_loss_table(kind: &LossKind, instance: &TrainingInstance) -> Result<(Array2<f64>, f64)> {
    let (n, m) = (instance.g.num_nodes(), instance.g_prime.num_nodes());
    if n == 0 {
        return Ok((Array2::zeros((0, m)), 0.0));
    }
    let inv_n = 1.0 / n as f64;
    match kind {
        LossKind::Hamming => {
            let mut table = Array2::zeros((n, m));
            for (i, ip) in instance.y_true.pairs() {
                table[[i, ip]] = -inv_n;
            }
            Ok((table, 1.0))
        }
        LossKind::Endpoint(e) => {
            let params = EndpointLoss { sigma: instance.scene_width, ..*e };
            params.validate()?;
            let truth = true_positions(instance);
            let pts = instance.g_prime.points();
            let sign = if params.literal { -1.0 } else { 1.0 };
            let table = Array2::from_shape_fn((n, m), |(i, ip)| sign * inv_n * params.term(dist(pts[ip], truth[i])));
            Ok((table, if params.literal { 1.0 } else { 0.0 }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_cases() {
        let t = Matching::identity(30);
        assert_eq!(hamming_loss(&t, &t).unwrap(), 0.0);
        // 12 of 30 rows rotated among themselves.
        let mut map: Vec<usize> = (0..30).collect();
        map[..12].rotate_left(1);
        let y = Matching::new(map, 30).unwrap();
        assert!((hamming_loss(&y, &t).unwrap() - 12.0 / 30.0).abs() < 1e-15);
        let y = Matching::new(vec![1, 2, 0], 3).unwrap();
        assert_eq!(hamming_loss(&y, &Matching::identity(3)).unwrap(), 1.0);
        assert!(hamming_loss(&Matching::identity(2), &t).is_err());
    }

    #[test]
    fn endpoint_cases() {
        let targets = [[0.0, 0.0], [10.0, 0.0], [0.0, 3.0]];
        let y = Matching::new(vec![0, 1], 3).unwrap();
        assert_eq!(endpoint_loss(&y, &[[0.0, 0.0], [10.0, 0.0]], &targets, 10.0).unwrap(), 0.0);
        // 0.1 sigma and 0.3 sigma away.
        let truth = [[1.0, 0.0], [10.0, 3.0]];
        assert!((endpoint_loss(&y, &truth, &targets, 10.0).unwrap() - 0.2).abs() < 1e-15);
        // At or beyond sigma.
        let truth = [[10.0, 0.0], [40.0, 0.0]];
        assert_eq!(endpoint_loss(&y, &truth, &targets, 10.0).unwrap(), 1.0);
        assert!(endpoint_loss(&y, &truth, &targets, 0.0).is_err());
    }

    #[test]
    fn endpoint_literal_and_unclamped() {
        let targets = [[0.0, 0.0], [30.0, 0.0]];
        let y = Matching::new(vec![1], 2).unwrap();
        let truth = [[0.0, 0.0]];
        let mut p = EndpointLoss::new(10.0).unwrap();
        assert_eq!(endpoint_loss_with(&y, &truth, &targets, &p).unwrap(), 1.0);
        p.clamp = false;
        assert_eq!(endpoint_loss_with(&y, &truth, &targets, &p).unwrap(), 3.0);
        p.clamp = true;
        p.literal = true;
        assert_eq!(endpoint_loss_with(&y, &truth, &targets, &p).unwrap(), 0.0);
    }
}
