//! Node attributes, adjacency construction, and the joint feature map
//! `Phi(G, G', y)` whose inner product with `[w1 w2]` is the matching
//! objective.

mod delaunay;
mod shape_context;

pub use delaunay::{delaunay_adjacency, delaunay_triangles};
pub use shape_context::{mean_pairwise_distance, shape_context, ShapeContextConfig};

use std::ops::{Add, Sub};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::graph::{
    edge_contraction, preserved_edge_pairs, AttributedGraph, Matching, Point, TrainingInstance, WeightVector,
};

/// Unary feature map: componentwise negated squared difference.
pub fn phi1(attr_i: ArrayView1<f64>, attr_i_prime: ArrayView1<f64>) -> Result<Array1<f64>> {
    if attr_i.len() != attr_i_prime.len() {
        return Err(Error::dims("phi1 attribute length", attr_i.len(), attr_i_prime.len()));
    }
    Ok(ndarray::Zip::from(&attr_i).and(&attr_i_prime).map_collect(|&a, &b| -(a - b) * (a - b)))
}

/// Pairwise feature map on binary edge attributes.
pub fn phi2(gij: u8, gpij: u8) -> f64 {
    f64::from(gij) * f64::from(gpij)
}

/// Sufficient statistics of a (graph pair, matching) triple, aligned with
/// `[w1 w2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFeature {
    pub node_part: Array1<f64>,
    pub edge_part: f64,
}

impl JointFeature {
    pub fn zeros(attr_dim: usize) -> Self {
        Self { node_part: Array1::zeros(attr_dim), edge_part: 0.0 }
    }

    pub fn dot(&self, w: &WeightVector) -> f64 {
        self.node_part.dot(&w.w1) + self.edge_part * w.w2
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.node_part.to_vec();
        v.push(self.edge_part);
        v
    }

    pub fn len(&self) -> usize {
        self.node_part.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Sub for &JointFeature {
    type Output = JointFeature;

    fn sub(self, rhs: &JointFeature) -> JointFeature {
        JointFeature { node_part: &self.node_part - &rhs.node_part, edge_part: self.edge_part - rhs.edge_part }
    }
}

impl Add for &JointFeature {
    type Output = JointFeature;

    fn add(self, rhs: &JointFeature) -> JointFeature {
        JointFeature { node_part: &self.node_part + &rhs.node_part, edge_part: self.edge_part + rhs.edge_part }
    }
}

fn check_pair(g: &AttributedGraph, g_prime: &AttributedGraph) -> Result<()> {
    if g.attr_dim() != g_prime.attr_dim() {
        return Err(Error::dims("attribute dimension", g.attr_dim(), g_prime.attr_dim()));
    }
    Ok(())
}

/// `Phi(G, G', y)` for a matching. The edge part counts ordered edge pairs
/// preserved by `y`.
pub fn joint_feature(g: &AttributedGraph, g_prime: &AttributedGraph, y: &Matching) -> Result<JointFeature> {
    check_pair(g, g_prime)?;
    y.check_shape(g.num_nodes(), g_prime.num_nodes())?;
    let mut node_part = Array1::zeros(g.attr_dim());
    for (i, ip) in y.pairs() {
        let a = g.node_attrs().row(i);
        let b = g_prime.node_attrs().row(ip);
        ndarray::Zip::from(&mut node_part).and(&a).and(&b).for_each(|acc, &x, &z| *acc -= (x - z) * (x - z));
    }
    Ok(JointFeature { node_part, edge_part: preserved_edge_pairs(g, g_prime, y) as f64 })
}

/// `Phi` for an arbitrary real assignment matrix.
pub fn relaxed_joint_feature(
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
    y: ArrayView2<f64>,
) -> Result<JointFeature> {
    check_pair(g, g_prime)?;
    let expected = (g.num_nodes(), g_prime.num_nodes());
    if y.dim() != expected {
        return Err(Error::dims(
            "assignment shape",
            format!("{}x{}", expected.0, expected.1),
            format!("{}x{}", y.nrows(), y.ncols()),
        ));
    }
    let mut node_part = Array1::zeros(g.attr_dim());
    for ((i, ip), &v) in y.indexed_iter() {
        if v == 0.0 {
            continue;
        }
        let f = phi1(g.node_attrs().row(i), g_prime.node_attrs().row(ip))?;
        node_part.scaled_add(v, &f);
    }
    let edge_part = (&edge_contraction(g, g_prime, y) * &y).sum();
    Ok(JointFeature { node_part, edge_part })
}

/// `Psi^n(y) = Phi(y^n) - Phi(y)`.
pub fn psi(instance: &TrainingInstance, y: &Matching) -> Result<JointFeature> {
    let truth = joint_feature(&instance.g, &instance.g_prime, &instance.y_true)?;
    let other = joint_feature(&instance.g, &instance.g_prime, y)?;
    Ok(&truth - &other)
}

/// Graph over `points` with shape-context attributes and, optionally,
/// Delaunay adjacency.
pub fn build_graph(points: &[Point], cfg: &ShapeContextConfig, triangulate: bool) -> Result<AttributedGraph> {
    let attrs = shape_context(points, cfg)?;
    if triangulate {
        AttributedGraph::new(points.to_vec(), attrs, delaunay_adjacency(points)?)
    } else {
        AttributedGraph::without_edges(points.to_vec(), attrs)
    }
}

/// Raw exponential-decay compatibilities `exp(-||G_i - G'_i'||^2)`.
pub fn exp_decay_compatibilities(g: &AttributedGraph, g_prime: &AttributedGraph) -> Result<Array2<f64>> {
    check_pair(g, g_prime)?;
    Ok(squared_attr_distances(g, g_prime).mapv(|d| (-d).exp()))
}

pub(crate) fn squared_attr_distances(g: &AttributedGraph, g_prime: &AttributedGraph) -> Array2<f64> {
    let (a, b) = (g.node_attrs(), g_prime.node_attrs());
    Array2::from_shape_fn((g.num_nodes(), g_prime.num_nodes()), |(i, ip)| {
        a.row(i).iter().zip(b.row(ip).iter()).map(|(x, z)| (x - z) * (x - z)).sum()
    })
}
