use std::f64::consts::TAU;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Point;

/// Log-polar histogram layout. Radial bins are half-open `[lo, hi)` with
/// the first bin's lower edge at 0 excluded; radii are measured in units of
/// the mean pairwise distance of the scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeContextConfig {
    pub angular_bins: usize,
    pub radial_bin_edges: Vec<f64>,
}

impl Default for ShapeContextConfig {
    fn default() -> Self {
        Self { angular_bins: 12, radial_bin_edges: vec![0.125, 0.25, 0.5, 1.0, 2.0] }
    }
}

impl ShapeContextConfig {
    pub fn dim(&self) -> usize {
        self.angular_bins * self.radial_bin_edges.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.angular_bins == 0 || self.radial_bin_edges.is_empty() {
            return Err(Error::InvalidArgument("shape context needs at least one bin".into()));
        }
        if self.radial_bin_edges[0] <= 0.0 || self.radial_bin_edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("radial bin edges must be positive and strictly increasing".into()));
        }
        Ok(())
    }

    /// Bin of a normalized radius, `None` for `r == 0` or `r >= outer edge`.
    pub fn radial_bin(&self, r: f64) -> Option<usize> {
        if r <= 0.0 {
            return None;
        }
        self.radial_bin_edges.iter().position(|&edge| r < edge)
    }

    pub fn angular_bin(&self, angle: f64) -> usize {
        let a = angle.rem_euclid(TAU);
        let bin = (a / TAU * self.angular_bins as f64).floor() as usize;
        bin.min(self.angular_bins - 1)
    }
}

/// Mean Euclidean distance over unordered pairs of distinct indices.
pub fn mean_pairwise_distance(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += distance(points[i], points[j]);
        }
    }
    total / (n * (n - 1) / 2) as f64
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Shape-context histograms, one row per point. Feature index is
/// `radial_bin * angular_bins + angular_bin`.
pub fn shape_context(points: &[Point], cfg: &ShapeContextConfig) -> Result<Array2<f64>> {
    cfg.validate()?;
    if points.len() < 2 {
        return Err(Error::Degenerate(format!("shape context needs at least 2 points, got {}", points.len())));
    }
    let mean = mean_pairwise_distance(points);
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let n = points.len();
    let mut hist = Array2::zeros((n, cfg.dim()));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (dx, dy) = (points[j][0] - points[i][0], points[j][1] - points[i][1]);
            let Some(rb) = cfg.radial_bin(dx.hypot(dy) / mean) else {
                continue;
            };
            let ab = cfg.angular_bin(dy.atan2(dx));
            hist[[i, rb * cfg.angular_bins + ab]] += 1.0;
        }
    }
    Ok(hist)
}
