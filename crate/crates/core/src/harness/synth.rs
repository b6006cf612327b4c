use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::scene::SceneFile;
use crate::error::{Error, Result};
use crate::graph::Point;

/// Width of synthetic scenes; base clouds are drawn in a disc of radius
/// `0.4 * SYNTH_WIDTH` about the scene centre.
pub const SYNTH_WIDTH: f64 = 100.0;

/// Generates a labelled frame sequence: one random base cloud, rotated by
/// `t * rotation_per_frame` radians about its centroid in frame `t`, plus
/// i.i.d. Gaussian jitter with standard deviation `noise_sigma` times the
/// cloud diameter. Landmark ids are the point indices.
pub fn synth_sequence(
    num_frames: usize,
    num_points: usize,
    noise_sigma: f64,
    rotation_per_frame: f64,
    seed: u64,
) -> Result<Vec<SceneFile>> {
    if num_points < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 points, got {num_points}")));
    }
    if num_frames == 0 {
        return Err(Error::InvalidArgument("need at least one frame".into()));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) || !rotation_per_frame.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid noise {noise_sigma} or rotation {rotation_per_frame}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 0.4 * SYNTH_WIDTH;
    let centre = 0.5 * SYNTH_WIDTH;
    let base: Vec<Point> = (0..num_points)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            [centre + r * theta.cos(), centre + r * theta.sin()]
        })
        .collect();
    let n = num_points as f64;
    let cx = base.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = base.iter().map(|p| p[1]).sum::<f64>() / n;
    let diameter = diameter(&base);
    let jitter = Normal::new(0.0, noise_sigma * diameter).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    (0..num_frames)
        .map(|t| {
            let (s, c) = (t as f64 * rotation_per_frame).sin_cos();
            let points = base
                .iter()
                .map(|p| {
                    let (dx, dy) = (p[0] - cx, p[1] - cy);
                    let mut q = [cx + c * dx - s * dy, cy + s * dx + c * dy];
                    if noise_sigma > 0.0 {
                        q[0] += jitter.sample(&mut rng);
                        q[1] += jitter.sample(&mut rng);
                    }
                    q
                })
                .collect();
            SceneFile::new(points, Some((0..num_points as u64).collect()), SYNTH_WIDTH)
        })
        .collect()
}

fn diameter(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_sequence_repeats_frame() {
        let frames = synth_sequence(5, 8, 0.0, 0.0, 3).unwrap();
        assert!(frames.iter().all(|f| f == &frames[0]));
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = synth_sequence(4, 10, 0.03, 0.05, 11).unwrap();
        let b = synth_sequence(4, 10, 0.03, 0.05, 11).unwrap();
        let text = |v: &[SceneFile]| v.iter().map(SceneFile::to_text).collect::<String>();
        assert_eq!(text(&a), text(&b));
        let c = synth_sequence(4, 10, 0.03, 0.05, 12).unwrap();
        assert_ne!(text(&a), text(&c));
    }

    #[test]
    fn rotation_preserves_distances_without_noise() {
        let f = synth_sequence(3, 6, 0.0, 0.3, 5).unwrap();
        let d = |s: &SceneFile| (s.points[0][0] - s.points[3][0]).hypot(s.points[0][1] - s.points[3][1]);
        assert!((d(&f[0]) - d(&f[2])).abs() < 1e-9);
        assert!((f[0].points[0][0] - f[2].points[0][0]).abs() > 1e-6);
    }

    #[test]
    fn degenerate_parameters() {
        assert!(synth_sequence(3, 3, 0.0, 0.0, 1).is_err());
        assert!(synth_sequence(0, 5, 0.0, 0.0, 1).is_err());
        assert!(synth_sequence(3, 5, -0.1, 0.0, 1).is_err());
        assert!(synth_sequence(3, 5, 0.1, f64::NAN, 1).is_err());
    }
}
