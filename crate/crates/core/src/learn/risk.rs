use rayon::prelude::*;

use super::inference::{most_violated, predict, Inference, MostViolated};
use crate::error::{Error, Result};
use crate::graph::{TrainingInstance, WeightVector};
use crate::loss::LossKind;

/// Structured hinge risk `(1/N) sum_n xi_n` and one subgradient, without
/// the regularizer.
#[derive(Debug, Clone)]
pub struct EmpiricalRisk {
    pub value: f64,
    /// Subgradient with respect to `[w1 w2]`.
    pub grad: Vec<f64>,
    /// Per-instance slacks `xi_n = max(0, violation_n)`.
    pub xi: Vec<f64>,
    /// Per-instance loss of the most violating matching.
    pub violator_losses: Vec<f64>,
}

fn check_instances(w: &WeightVector, instances: &[TrainingInstance]) -> Result<()> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("need at least one training instance".into()));
    }
    if let Some(bad) = instances.iter().find(|x| x.attr_dim() != w.attr_dim()) {
        return Err(Error::dims("instance attribute dimension", w.attr_dim(), bad.attr_dim()));
    }
    Ok(())
}

/// Hinge risk and subgradient. With linear inference the edge weight is not
/// a model parameter, so its gradient component is reported as zero.
pub fn empirical_risk_and_subgradient(
    w: &WeightVector,
    instances: &[TrainingInstance],
    loss: &LossKind,
    inference: &Inference,
) -> Result<EmpiricalRisk> {
    check_instances(w, instances)?;
    let violators: Vec<MostViolated> =
        instances.par_iter().map(|inst| most_violated(w, inst, loss, inference)).collect::<Result<_>>()?;

    let inv_n = 1.0 / instances.len() as f64;
    let mut grad = vec![0.0; w.len()];
    let mut xi = Vec::with_capacity(violators.len());
    let mut value = 0.0;
    for v in &violators {
        let slack = v.violation.max(0.0);
        xi.push(slack);
        value += slack * inv_n;
        if v.violation > 0.0 {
            for (gk, pk) in grad.iter_mut().zip(v.psi.to_vec()) {
                *gk -= pk * inv_n;
            }
        }
    }
    if inference.is_linear() {
        *grad.last_mut().expect("non-empty") = 0.0;
    }
    Ok(EmpiricalRisk { value, grad, xi, violator_losses: violators.iter().map(|v| v.loss).collect() })
}

/// `(1/N) sum_n max(0, violation_n) + (lambda/2) ||w||^2` and its
/// subgradient.
pub fn regularized_risk_and_subgradient(
    w: &WeightVector,
    instances: &[TrainingInstance],
    loss: &LossKind,
    inference: &Inference,
    lambda: f64,
) -> Result<(f64, Vec<f64>)> {
    let emp = empirical_risk_and_subgradient(w, instances, loss, inference)?;
    let wv = w.to_vec();
    let value = emp.value + 0.5 * lambda * w.norm_sq();
    let grad = emp.grad.iter().zip(&wv).map(|(g, wk)| g + lambda * wk).collect();
    Ok((value, grad))
}

/// Mean loss of the predictor `argmax_y <w, Phi(y)>` on `instances`, and the
/// per-instance losses.
pub fn prediction_risk(
    w: &WeightVector,
    instances: &[TrainingInstance],
    loss: &LossKind,
    inference: &Inference,
) -> Result<(f64, Vec<f64>)> {
    check_instances(w, instances)?;
    let losses: Vec<f64> = instances
        .par_iter()
        .map(|inst| {
            let y = predict(w, &inst.g, &inst.g_prime, inference)?;
            loss.evaluate(inst, &y)
        })
        .collect::<Result<_>>()?;
    let mean = losses.iter().sum::<f64>() / losses.len() as f64;
    Ok((mean, losses))
}
