//! Attributed graph matching with learned compatibility functions.
//!
//! A matching between a query graph `G` and a target graph `G'` maximizes
//!
//! ```text
//! sum_{ii'} c_{ii'} y_{ii'} + sum_{ii'jj'} d_{ii'jj'} y_{ii'} y_{jj'}
//! ```
//!
//! over injective 0/1 assignments `y`. The compatibilities are linear in a
//! weight vector `w = [w1 w2]`: `c` comes from shape-context node features
//! and `d` from preserved edges. [`learn`] estimates `w` from labelled graph
//! pairs by max-margin structured estimation; [`solvers`] provides the
//! linear and quadratic assignment engines used for inference.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod features;
pub mod graph;
pub mod harness;
pub mod learn;
pub mod loss;
pub mod solvers;

pub use error::{Error, Result};
pub use graph::{
    objective_value, relaxed_objective, validate_matching, AttributedGraph, CompatibilityTables, Matching,
    MatchingViolation, Point, TrainingInstance, WeightVector,
};
