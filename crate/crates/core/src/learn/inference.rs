use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{joint_feature, JointFeature};
use crate::graph::{AttributedGraph, CompatibilityTables, Matching, TrainingInstance, WeightVector};
use crate::loss::{assignment_loss_table, LossKind};
use crate::solvers::{graduated_assignment, linear_assignment, GraduatedAssignmentConfig};

/// How the argmax over matchings is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inference {
    /// Exact linear assignment; only valid for the linear model (`w2 = 0`).
    Linear,
    /// Graduated assignment on the full quadratic objective.
    Graduated(GraduatedAssignmentConfig),
}

impl Inference {
    pub fn graduated() -> Self {
        Inference::Graduated(GraduatedAssignmentConfig::default())
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Inference::Linear)
    }

    fn solve(&self, tables: &CompatibilityTables, g: &AttributedGraph, g_prime: &AttributedGraph) -> Result<Matching> {
        match self {
            Inference::Linear => {
                if tables.edge_weight != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "linear inference is exact only for the linear model, but edge weight is {}",
                        tables.edge_weight
                    )));
                }
                linear_assignment(tables.c.view())
            }
            Inference::Graduated(cfg) => graduated_assignment(tables, g, g_prime, cfg),
        }
    }
}

/// `c_{ii'} = <phi1(G_i, G'_i'), w1>`, `edge_weight = w2`.
pub fn build_tables(w: &WeightVector, g: &AttributedGraph, g_prime: &AttributedGraph) -> Result<CompatibilityTables> {
    let d = w.attr_dim();
    if g.attr_dim() != d || g_prime.attr_dim() != d {
        return Err(Error::dims(
            "attribute dimension vs w1",
            d,
            format!("{} and {}", g.attr_dim(), g_prime.attr_dim()),
        ));
    }
    let (a, b) = (g.node_attrs(), g_prime.node_attrs());
    let c = Array2::from_shape_fn((g.num_nodes(), g_prime.num_nodes()), |(i, ip)| {
        let mut s = 0.0;
        for r in 0..d {
            let diff = a[[i, r]] - b[[ip, r]];
            s -= w.w1[r] * diff * diff;
        }
        s
    });
    Ok(CompatibilityTables::new(c, w.w2))
}

/// Prediction `argmax_y <w, Phi(G, G', y)>`.
pub fn predict(
    w: &WeightVector,
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
    inference: &Inference,
) -> Result<Matching> {
    inference.solve(&build_tables(w, g, g_prime)?, g, g_prime)
}

/// Linear assignment on the unary term alone, ignoring `w2`.
pub fn predict_linear_model(w: &WeightVector, g: &AttributedGraph, g_prime: &AttributedGraph) -> Result<Matching> {
    let tables = build_tables(w, g, g_prime)?;
    linear_assignment(tables.c.view())
}

/// Tables whose objective equals `<w, Phi(y)> + Delta(y, y^n) - constant`.
#[derive(Debug, Clone)]
pub struct AugmentedTables {
    pub tables: CompatibilityTables,
    pub constant: f64,
}

/// Loss-augmented compatibilities. For the Hamming loss the unary term is
/// `<phi1, w1> - y^n_{ii'} / ||y^n||_F^2` with constant 1; for the endpoint
/// loss it is `<phi1, w1>` plus the clamped distance of each assignment
/// divided by the number of query nodes. The edge term is unchanged.
pub fn build_augmented_tables(
    w: &WeightVector,
    instance: &TrainingInstance,
    loss: &LossKind,
) -> Result<AugmentedTables> {
    let mut tables = build_tables(w, &instance.g, &instance.g_prime)?;
    let (table, constant) = assignment_loss_table(loss, instance)?;
    tables.c += &table;
    Ok(AugmentedTables { tables, constant })
}

/// The most violated margin constraint of one training instance.
#[derive(Debug, Clone)]
pub struct MostViolated {
    pub y_hat: Matching,
    /// `<w, Phi(y_hat)> + Delta(y_hat, y^n) - <w, Phi(y^n)>`.
    pub violation: f64,
    pub loss: f64,
    /// `Psi^n(y_hat) = Phi(y^n) - Phi(y_hat)`.
    pub psi: JointFeature,
}

pub fn most_violated(
    w: &WeightVector,
    instance: &TrainingInstance,
    loss: &LossKind,
    inference: &Inference,
) -> Result<MostViolated> {
    let aug = build_augmented_tables(w, instance, loss)?;
    let y_hat = inference.solve(&aug.tables, &instance.g, &instance.g_prime)?;
    let truth = joint_feature(&instance.g, &instance.g_prime, &instance.y_true)?;
    let found = joint_feature(&instance.g, &instance.g_prime, &y_hat)?;
    let psi = &truth - &found;
    let loss_value = loss.evaluate(instance, &y_hat)?;
    Ok(MostViolated { violation: loss_value - psi.dot(w), loss: loss_value, psi, y_hat })
}
