use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bundle::{BundleMaster, CuttingPlane};
use super::inference::Inference;
use super::risk::{empirical_risk_and_subgradient, prediction_risk};
use crate::error::{Error, Result};
use crate::graph::{TrainingInstance, WeightVector};
use crate::loss::LossKind;

/// Slack allowed when checking `mean xi >= empirical risk` in floating point.
pub const LEMMA_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub lambda: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub inference: Inference,
    pub loss: LossKind,
}

impl LearnerConfig {
    pub fn new(lambda: f64, inference: Inference, loss: LossKind) -> Self {
        Self { lambda, epsilon: 1e-3, max_iterations: 200, inference, loss }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda {} must be positive", self.lambda)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon {} must be positive", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// One column-generation round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `(1/N) sum xi_n` at this iterate.
    pub slack_mean: f64,
    /// Mean loss of the predictor at this iterate.
    pub empirical_risk: f64,
    /// Slack mean plus regularizer at this iterate.
    pub regularized_risk: f64,
    /// Best regularized risk seen so far.
    pub upper_bound: f64,
    /// Master-problem lower bound after adding this iterate's plane.
    pub lower_bound: f64,
    pub gap: f64,
    pub wall_time_s: f64,
    /// Whether `slack_mean >= empirical_risk` held at this iterate.
    pub bound_holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainerState {
    /// Best (lowest regularized risk) iterate.
    pub w: WeightVector,
    pub cutting_planes: Vec<CuttingPlane>,
    /// Slacks at `w`.
    pub xi: Vec<f64>,
    /// Regularized risk at `w`; never below `mean(xi)`, which in turn bounds
    /// `empirical_risk` when inference is exact.
    pub risk_upper_bound: f64,
    pub empirical_risk: f64,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
}

impl TrainerState {
    pub fn slack_mean(&self) -> f64 {
        self.xi.iter().sum::<f64>() / self.xi.len().max(1) as f64
    }

    /// Tab-separated training log with a header row.
    pub fn write_log(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "iteration\tslack_mean\tempirical_risk\tregularized_risk\tupper_bound\tlower_bound\tgap\twall_time_s\tbound_holds"
        )?;
        for r in &self.history {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.iteration,
                r.slack_mean,
                r.empirical_risk,
                r.regularized_risk,
                r.upper_bound,
                r.lower_bound,
                r.gap,
                r.wall_time_s,
                r.bound_holds
            )?;
        }
        Ok(())
    }
}

/// Column generation with a bundle master problem, starting from `w = 0`.
///
/// Each round finds the most violated matching of every instance at the
/// current `w`, turns the resulting risk value and subgradient into a
/// cutting plane, and re-solves the master problem for the next `w`. Stops
/// once the best observed regularized risk is within `epsilon` of the
/// master lower bound. Running out of iterations is reported through
/// `converged = false`, not as an error.
pub fn train(instances: &[TrainingInstance], cfg: &LearnerConfig) -> Result<TrainerState> {
    cfg.validate()?;
    let first =
        instances.first().ok_or_else(|| Error::InvalidArgument("need at least one training instance".into()))?;
    let attr_dim = first.attr_dim();
    let dim = attr_dim + 1;
    let start = Instant::now();

    let mut master = BundleMaster::new(cfg.lambda, dim);
    let mut w = WeightVector::zeros(attr_dim);
    let mut best: Option<(f64, WeightVector, Vec<f64>, f64)> = None;
    let mut history = Vec::new();
    let mut converged = false;

    for iteration in 1..=cfg.max_iterations {
        let emp = empirical_risk_and_subgradient(&w, instances, &cfg.loss, &cfg.inference)?;
        let (empirical_risk, _) = prediction_risk(&w, instances, &cfg.loss, &cfg.inference)?;
        let regularized = emp.value + 0.5 * cfg.lambda * w.norm_sq();
        if best.as_ref().is_none_or(|b| regularized < b.0) {
            best = Some((regularized, w.clone(), emp.xi.clone(), empirical_risk));
        }
        let upper_bound = best.as_ref().expect("set above").0;

        let wv = w.to_vec();
        let offset = emp.value - super::bundle::dot(&emp.grad, &wv);
        master.add_plane(CuttingPlane { gradient: emp.grad.clone(), offset });
        let sol = master.solve();
        let gap = upper_bound - sol.lower_bound;

        history.push(IterationRecord {
            iteration,
            slack_mean: emp.value,
            empirical_risk,
            regularized_risk: regularized,
            upper_bound,
            lower_bound: sol.lower_bound,
            gap,
            wall_time_s: start.elapsed().as_secs_f64(),
            bound_holds: emp.value + LEMMA_TOLERANCE >= empirical_risk,
        });

        if gap <= cfg.epsilon {
            converged = true;
            break;
        }
        w = WeightVector::from_slice(&sol.w)?;
        if cfg.inference.is_linear() {
            w.w2 = 0.0;
        }
    }

    let (risk_upper_bound, w, xi, empirical_risk) = best.expect("at least one iteration");
    Ok(TrainerState {
        w,
        cutting_planes: master.planes().to_vec(),
        xi,
        risk_upper_bound,
        empirical_risk,
        converged,
        history,
    })
}
