use delaunator::{triangulate, Point as DPoint};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::Point;

/// Triangles of a Delaunay triangulation as index triples.
pub fn delaunay_triangles(points: &[Point]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("triangulation needs at least 3 points, got {}", points.len())));
    }
    let pts: Vec<DPoint> = points.iter().map(|p| DPoint { x: p[0], y: p[1] }).collect();
    let tri = triangulate(&pts);
    if tri.triangles.is_empty() {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    Ok(tri.triangles.chunks_exact(3).map(|t| [t[0], t[1], t[2]]).collect())
}

/// Symmetric 0/1 adjacency of the Delaunay triangulation.
pub fn delaunay_adjacency(points: &[Point]) -> Result<Array2<u8>> {
    let n = points.len();
    let mut adj = Array2::zeros((n, n));
    for t in delaunay_triangles(points)? {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            adj[[a, b]] = 1;
            adj[[b, a]] = 1;
        }
    }
    Ok(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_complete() {
        let adj = delaunay_adjacency(&[[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]]).unwrap();
        assert_eq!(adj.sum(), 6);
        assert!((0..3).all(|i| adj[[i, i]] == 0));
    }

    #[test]
    fn too_few_or_collinear() {
        assert!(delaunay_adjacency(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(delaunay_adjacency(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).is_err());
    }

    #[test]
    fn convex_quad_has_five_edges() {
        let pts = [[0.0, 0.0], [2.0, 0.1], [2.2, 1.9], [-0.1, 1.7]];
        let adj = delaunay_adjacency(&pts).unwrap();
        assert_eq!(adj.iter().map(|&v| v as usize).sum::<usize>() / 2, 5);
        assert!(!(adj[[0, 2]] == 1 && adj[[1, 3]] == 1));
    }
}
