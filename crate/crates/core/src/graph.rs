//! Domain types shared across the crate: attributed graphs, matchings,
//! weight vectors, compatibility tables and training instances, plus the
//! quadratic-assignment objective evaluated on them.

use std::fmt;

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// A graph with 2-D node positions, per-node attribute vectors and a binary
/// symmetric adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    points: Vec<Point>,
    node_attrs: Array2<f64>,
    adjacency: Array2<u8>,
    neighbors: Vec<Vec<usize>>,
    num_edges: usize,
}

impl AttributedGraph {
    pub fn new(points: Vec<Point>, node_attrs: Array2<f64>, adjacency: Array2<u8>) -> Result<Self> {
        let n = points.len();
        if node_attrs.nrows() != n {
            return Err(Error::dims("node attribute rows", n, node_attrs.nrows()));
        }
        if adjacency.dim() != (n, n) {
            return Err(Error::dims(
                "adjacency shape",
                format!("{n}x{n}"),
                format!("{}x{}", adjacency.nrows(), adjacency.ncols()),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGraph("non-finite coordinate".into()));
        }
        if node_attrs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGraph("non-finite node attribute".into()));
        }
        let mut neighbors = vec![Vec::new(); n];
        let mut num_edges = 0;
        for i in 0..n {
            if adjacency[[i, i]] != 0 {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            for j in 0..n {
                let a = adjacency[[i, j]];
                if a > 1 {
                    return Err(Error::InvalidGraph(format!("adjacency ({i},{j}) = {a} is not 0/1")));
                }
                if a != adjacency[[j, i]] {
                    return Err(Error::InvalidGraph(format!("adjacency not symmetric at ({i},{j})")));
                }
                if a == 1 {
                    neighbors[i].push(j);
                    if i < j {
                        num_edges += 1;
                    }
                }
            }
        }
        Ok(Self { points, node_attrs, adjacency, neighbors, num_edges })
    }

    /// Graph without edges.
    pub fn without_edges(points: Vec<Point>, node_attrs: Array2<f64>) -> Result<Self> {
        let n = points.len();
        Self::new(points, node_attrs, Array2::zeros((n, n)))
    }

    pub fn num_nodes(&self) -> usize {
        self.points.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn attr_dim(&self) -> usize {
        self.node_attrs.ncols()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn node_attrs(&self) -> &Array2<f64> {
        &self.node_attrs
    }

    pub fn adjacency(&self) -> &Array2<u8> {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[[i, j]] == 1
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Undirected edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Same graph with node `k` of the result being node `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_nodes();
        if perm.len() != n {
            return Err(Error::dims("permutation length", n, perm.len()));
        }
        let points = perm.iter().map(|&p| self.points[p]).collect();
        let attrs = self.node_attrs.select(ndarray::Axis(0), perm);
        let adjacency = Array2::from_shape_fn((n, n), |(a, b)| self.adjacency[[perm[a], perm[b]]]);
        Self::new(points, attrs, adjacency)
    }
}

/// First violated constraint of a candidate matching matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum MatchingViolation {
    Shape { expected: (usize, usize), actual: (usize, usize) },
    NotBinary { row: usize, col: usize, value: f64 },
    RowSum { row: usize, sum: f64 },
    ColumnSum { col: usize, sum: f64 },
    ColumnOutOfRange { row: usize, col: usize, cols: usize },
    MoreRowsThanColumns { rows: usize, cols: usize },
}

impl fmt::Display for MatchingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingViolation::Shape { expected, actual } => {
                write!(f, "shape {}x{} does not match expected {}x{}", actual.0, actual.1, expected.0, expected.1)
            }
            MatchingViolation::NotBinary { row, col, value } => {
                write!(f, "entry ({row},{col}) = {value} is not 0/1")
            }
            MatchingViolation::RowSum { row, sum } => write!(f, "row {row} sums to {sum}"),
            MatchingViolation::ColumnSum { col, sum } => write!(f, "column {col} sum {sum} > 1"),
            MatchingViolation::ColumnOutOfRange { row, col, cols } => {
                write!(f, "row {row} maps to column {col}, but there are only {cols} columns")
            }
            MatchingViolation::MoreRowsThanColumns { rows, cols } => {
                write!(f, "{rows} rows cannot be matched injectively into {cols} columns")
            }
        }
    }
}

impl std::error::Error for MatchingViolation {}

/// Checks that `y` is an `n x n_prime` 0/1 matrix with unit row sums and
/// column sums of at most one.
pub fn validate_matching(y: ArrayView2<f64>, n: usize, n_prime: usize) -> std::result::Result<(), MatchingViolation> {
    if y.dim() != (n, n_prime) {
        return Err(MatchingViolation::Shape { expected: (n, n_prime), actual: y.dim() });
    }
    for ((row, col), &value) in y.indexed_iter() {
        if value != 0.0 && value != 1.0 {
            return Err(MatchingViolation::NotBinary { row, col, value });
        }
    }
    for (row, r) in y.rows().into_iter().enumerate() {
        let sum: f64 = r.sum();
        if sum != 1.0 {
            return Err(MatchingViolation::RowSum { row, sum });
        }
    }
    for (col, c) in y.columns().into_iter().enumerate() {
        let sum: f64 = c.sum();
        if sum > 1.0 {
            return Err(MatchingViolation::ColumnSum { col, sum });
        }
    }
    Ok(())
}

/// An injective map from the rows (query graph nodes) into the columns
/// (target graph nodes). Stored as the row-to-column map; the 0/1 matrix
/// form is available through [`Matching::to_matrix`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    map: Vec<usize>,
    cols: usize,
}

impl Matching {
    pub fn new(map: Vec<usize>, cols: usize) -> std::result::Result<Self, MatchingViolation> {
        if map.len() > cols {
            return Err(MatchingViolation::MoreRowsThanColumns { rows: map.len(), cols });
        }
        let mut used = vec![false; cols];
        for (row, &col) in map.iter().enumerate() {
            if col >= cols {
                return Err(MatchingViolation::ColumnOutOfRange { row, col, cols });
            }
            if used[col] {
                return Err(MatchingViolation::ColumnSum { col, sum: 2.0 });
            }
            used[col] = true;
        }
        Ok(Self { map, cols })
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect(), cols: n }
    }

    pub fn from_matrix(y: ArrayView2<f64>) -> std::result::Result<Self, MatchingViolation> {
        let (n, n_prime) = y.dim();
        validate_matching(y, n, n_prime)?;
        let map = y.rows().into_iter().map(|r| r.iter().position(|&v| v == 1.0).expect("validated row")).collect();
        Ok(Self { map, cols: n_prime })
    }

    pub fn to_matrix(&self) -> Array2<f64> {
        let mut y = Array2::zeros((self.rows(), self.cols));
        for (i, &j) in self.map.iter().enumerate() {
            y[[i, j]] = 1.0;
        }
        y
    }

    pub fn rows(&self) -> usize {
        self.map.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn target(&self, row: usize) -> usize {
        self.map[row]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Iterates `(i, i')` pairs with `y_{ii'} = 1`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().copied().enumerate()
    }

    pub fn check_shape(&self, n: usize, n_prime: usize) -> Result<()> {
        if self.rows() != n || self.cols != n_prime {
            return Err(MatchingViolation::Shape { expected: (n, n_prime), actual: (self.rows(), self.cols) }.into());
        }
        Ok(())
    }
}

/// Parameters `w = [w1 w2]` of the linear compatibility model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub w1: Array1<f64>,
    pub w2: f64,
}

impl WeightVector {
    pub fn new(w1: Array1<f64>, w2: f64) -> Result<Self> {
        if !w2.is_finite() || w1.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("weight vector has non-finite entries".into()));
        }
        Ok(Self { w1, w2 })
    }

    pub fn zeros(attr_dim: usize) -> Self {
        Self { w1: Array1::zeros(attr_dim), w2: 0.0 }
    }

    /// `w1` all ones with the given edge weight.
    pub fn flat(attr_dim: usize, w2: f64) -> Self {
        Self { w1: Array1::ones(attr_dim), w2 }
    }

    pub fn attr_dim(&self) -> usize {
        self.w1.len()
    }

    /// Length of the concatenated vector `[w1 w2]`.
    pub fn len(&self) -> usize {
        self.w1.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.w1.to_vec();
        v.push(self.w2);
        v
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let (&w2, w1) = v.split_last().ok_or_else(|| Error::InvalidArgument("empty weight vector".into()))?;
        Self::new(Array1::from(w1.to_vec()), w2)
    }

    pub fn norm_sq(&self) -> f64 {
        self.w1.dot(&self.w1) + self.w2 * self.w2
    }
}

/// Unary compatibilities `c` and the scalar that multiplies the factored
/// pairwise term `d_{ii'jj'} = edge_weight * G_{ij} * G'_{i'j'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityTables {
    pub c: Array2<f64>,
    pub edge_weight: f64,
}

impl CompatibilityTables {
    pub fn new(c: Array2<f64>, edge_weight: f64) -> Self {
        Self { c, edge_weight }
    }

    pub fn linear(c: Array2<f64>) -> Self {
        Self { c, edge_weight: 0.0 }
    }

    pub fn dim(&self) -> (usize, usize) {
        self.c.dim()
    }

    fn check(&self, g: &AttributedGraph, g_prime: &AttributedGraph) -> Result<()> {
        let expected = (g.num_nodes(), g_prime.num_nodes());
        if self.c.dim() != expected {
            return Err(Error::dims(
                "compatibility table shape",
                format!("{}x{}", expected.0, expected.1),
                format!("{}x{}", self.c.nrows(), self.c.ncols()),
            ));
        }
        Ok(())
    }
}

/// A labelled graph pair used for training or evaluation.
#[derive(Debug, Clone)]
pub struct TrainingInstance {
    pub g: AttributedGraph,
    pub g_prime: AttributedGraph,
    pub y_true: Matching,
    pub scene_width: f64,
}

impl TrainingInstance {
    pub fn new(g: AttributedGraph, g_prime: AttributedGraph, y_true: Matching, scene_width: f64) -> Result<Self> {
        y_true.check_shape(g.num_nodes(), g_prime.num_nodes())?;
        if !(scene_width > 0.0 && scene_width.is_finite()) {
            return Err(Error::InvalidArgument(format!("scene width {scene_width} must be positive")));
        }
        if g.attr_dim() != g_prime.attr_dim() {
            return Err(Error::dims("attribute dimension", g.attr_dim(), g_prime.attr_dim()));
        }
        Ok(Self { g, g_prime, y_true, scene_width })
    }

    pub fn attr_dim(&self) -> usize {
        self.g.attr_dim()
    }
}

/// `A y A'` for a (possibly soft) assignment `y`, using adjacency lists.
pub(crate) fn edge_contraction(g: &AttributedGraph, g_prime: &AttributedGraph, y: ArrayView2<f64>) -> Array2<f64> {
    let (n, n_prime) = y.dim();
    let mut ay = Array2::<f64>::zeros((n, n_prime));
    for i in 0..n {
        let mut row = ay.row_mut(i);
        for &j in g.neighbors(i) {
            row += &y.row(j);
        }
    }
    let mut out = Array2::<f64>::zeros((n, n_prime));
    for i in 0..n {
        for ip in 0..n_prime {
            out[[i, ip]] = g_prime.neighbors(ip).iter().map(|&jp| ay[[i, jp]]).sum();
        }
    }
    out
}

/// Number of ordered node pairs `(i, j)` adjacent in `g` whose images under
/// `y` are adjacent in `g_prime`.
pub(crate) fn preserved_edge_pairs(g: &AttributedGraph, g_prime: &AttributedGraph, y: &Matching) -> usize {
    g.edges().filter(|&(i, j)| g_prime.has_edge(y.target(i), y.target(j))).count() * 2
}

/// Quadratic-assignment objective `sum c y + sum d y y` of a matching.
pub fn objective_value(
    tables: &CompatibilityTables,
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
    y: &Matching,
) -> Result<f64> {
    tables.check(g, g_prime)?;
    y.check_shape(g.num_nodes(), g_prime.num_nodes())?;
    let linear: f64 = y.pairs().map(|(i, ip)| tables.c[[i, ip]]).sum();
    if tables.edge_weight == 0.0 {
        return Ok(linear);
    }
    let quadratic = preserved_edge_pairs(g, g_prime, y) as f64;
    Ok(linear + tables.edge_weight * quadratic)
}

/// Objective for an arbitrary real matrix `y` (relaxed assignments).
pub fn relaxed_objective(
    tables: &CompatibilityTables,
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
    y: ArrayView2<f64>,
) -> Result<f64> {
    tables.check(g, g_prime)?;
    let expected = (g.num_nodes(), g_prime.num_nodes());
    if y.dim() != expected {
        return Err(Error::dims(
            "assignment shape",
            format!("{}x{}", expected.0, expected.1),
            format!("{}x{}", y.nrows(), y.ncols()),
        ));
    }
    let linear = (&tables.c * &y).sum();
    if tables.edge_weight == 0.0 {
        return Ok(linear);
    }
    let quadratic = (&edge_contraction(g, g_prime, y) * &y).sum();
    Ok(linear + tables.edge_weight * quadratic)
}
