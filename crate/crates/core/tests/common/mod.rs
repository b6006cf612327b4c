//! Shared generators and independent reference implementations.
#![allow(dead_code, clippy::needless_range_loop)]

use graphmatch::{AttributedGraph, Matching, Point, TrainingInstance, WeightVector};
use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut impl Rng, n: usize) -> Vec<Point> {
    (0..n).map(|_| [rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)]).collect()
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, m: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, m), |_| rng.gen_range(lo..hi))
}

pub fn random_adjacency(rng: &mut impl Rng, n: usize, density: f64) -> Array2<u8> {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < density {
                a[[i, j]] = 1;
                a[[j, i]] = 1;
            }
        }
    }
    a
}

/// Graph with random points, attributes in `[0, 1)` and random edges.
pub fn random_graph(rng: &mut impl Rng, n: usize, dim: usize) -> AttributedGraph {
    let points = random_points(rng, n);
    let attrs = random_matrix(rng, n, dim, 0.0, 1.0);
    let adjacency = random_adjacency(rng, n, 0.5);
    AttributedGraph::new(points, attrs, adjacency).unwrap()
}

pub fn random_injection(rng: &mut impl Rng, n: usize, m: usize) -> Matching {
    let mut cols: Vec<usize> = (0..m).collect();
    cols.shuffle(rng);
    cols.truncate(n);
    Matching::new(cols, m).unwrap()
}

pub fn random_instance(rng: &mut impl Rng, n: usize, m: usize, dim: usize) -> TrainingInstance {
    let g = random_graph(rng, n, dim);
    let gp = random_graph(rng, m, dim);
    let y = random_injection(rng, n, m);
    TrainingInstance::new(g, gp, y, 100.0).unwrap()
}

pub fn random_weights(rng: &mut impl Rng, dim: usize, w2: f64) -> WeightVector {
    WeightVector::new(Array1::from_shape_fn(dim, |_| rng.gen_range(-1.0..1.0)), w2).unwrap()
}

/// Every injective map of `n` rows into `m` columns.
pub fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..m)
                    .filter(|c| !prefix.contains(c))
                    .map(|c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Quadratic objective by the four nested sums over `i, i', j, j'`.
pub fn objective_oracle(c: &Array2<f64>, edge_weight: f64, a: &Array2<u8>, ap: &Array2<u8>, map: &[usize]) -> f64 {
    let (n, m) = c.dim();
    let y = |i: usize, ip: usize| if map[i] == ip { 1.0 } else { 0.0 };
    let mut total = 0.0;
    for i in 0..n {
        for ip in 0..m {
            total += c[[i, ip]] * y(i, ip);
            for j in 0..n {
                for jp in 0..m {
                    let d = edge_weight * f64::from(a[[i, j]]) * f64::from(ap[[ip, jp]]);
                    total += d * y(i, ip) * y(j, jp);
                }
            }
        }
    }
    total
}

/// Joint feature `[sum_i -(a_i - b_{y(i)})^2, sum_{ij} A_ij A'_{y(i)y(j)}]`.
pub fn joint_feature_oracle(g: &AttributedGraph, gp: &AttributedGraph, map: &[usize]) -> Vec<f64> {
    let dim = g.attr_dim();
    let mut v = vec![0.0; dim + 1];
    for (i, &ip) in map.iter().enumerate() {
        for k in 0..dim {
            let d = g.node_attrs()[[i, k]] - gp.node_attrs()[[ip, k]];
            v[k] -= d * d;
        }
    }
    for (i, &ip) in map.iter().enumerate() {
        for (j, &jp) in map.iter().enumerate() {
            v[dim] += f64::from(g.adjacency()[[i, j]] * gp.adjacency()[[ip, jp]]);
        }
    }
    v
}

pub fn hamming_oracle(map: &[usize], truth: &[usize]) -> f64 {
    let agree = map.iter().zip(truth).filter(|(a, b)| a == b).count();
    1.0 - agree as f64 / map.len() as f64
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
