use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pairs::{PairInstance, Split};
use crate::error::{Error, Result};
use crate::graph::{Matching, TrainingInstance, WeightVector};
use crate::learn::{prediction_risk, train, Inference, LearnerConfig};
use crate::loss::LossKind;
use crate::solvers::{
    bistochastic_normalize_baseline, graduated_assignment, linear_assignment, GraduatedAssignmentConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignment {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Learned,
    Unlearned,
    Bistochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Method {
    pub assignment: Assignment,
    pub weighting: Weighting,
}

impl Method {
    pub const fn new(assignment: Assignment, weighting: Weighting) -> Self {
        Self { assignment, weighting }
    }

    pub fn all() -> Vec<Method> {
        let mut v = Vec::new();
        for a in [Assignment::Linear, Assignment::Quadratic] {
            for w in [Weighting::Learned, Weighting::Unlearned, Weighting::Bistochastic] {
                v.push(Method::new(a, w));
            }
        }
        v
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.assignment {
            Assignment::Linear => "linear",
            Assignment::Quadratic => "quadratic",
        };
        let w = match self.weighting {
            Weighting::Learned => "learned",
            Weighting::Unlearned => "unlearned",
            Weighting::Bistochastic => "bistochastic",
        };
        write!(f, "{a}-{w}")
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, w) = s
            .split_once('-')
            .ok_or_else(|| Error::InvalidArgument(format!("method {s:?} is not `<assignment>-<weighting>`")))?;
        let assignment = match a {
            "linear" => Assignment::Linear,
            "quadratic" => Assignment::Quadratic,
            _ => return Err(Error::InvalidArgument(format!("unknown assignment {a:?}"))),
        };
        let weighting = match w {
            "learned" => Weighting::Learned,
            "unlearned" => Weighting::Unlearned,
            "bistochastic" => Weighting::Bistochastic,
            _ => return Err(Error::InvalidArgument(format!("unknown weighting {w:?}"))),
        };
        Ok(Method::new(assignment, weighting))
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub lambda_grid: Vec<f64>,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub graduated: GraduatedAssignmentConfig,
    pub bistochastic_delta: f64,
    /// Record wall-clock inference time. Off makes reports byte-reproducible.
    pub timing: bool,
    pub timing_repeats: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lambda_grid: default_lambda_grid(),
            epsilon: 1e-3,
            max_iterations: 200,
            graduated: GraduatedAssignmentConfig::default(),
            bistochastic_delta: 1e-5,
            timing: true,
            timing_repeats: 3,
        }
    }
}

/// `10^-2, 10^-1, ..., 10^4`.
pub fn default_lambda_grid() -> Vec<f64> {
    vec![0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0]
}

/// How one method matches a pair at test time.
#[derive(Debug, Clone)]
pub enum Matcher {
    Weights { w: WeightVector, inference: Inference },
    Bistochastic { assignment: Assignment, delta: f64, graduated: GraduatedAssignmentConfig },
}

impl Matcher {
    pub fn for_weights(w: WeightVector, assignment: Assignment, graduated: &GraduatedAssignmentConfig) -> Self {
        let inference = match assignment {
            Assignment::Linear => Inference::Linear,
            Assignment::Quadratic => Inference::Graduated(graduated.clone()),
        };
        Matcher::Weights { w, inference }
    }

    pub fn run(&self, instance: &TrainingInstance) -> Result<Matching> {
        let (g, gp) = (&instance.g, &instance.g_prime);
        match self {
            Matcher::Weights { w, inference } => crate::learn::predict(w, g, gp, inference),
            Matcher::Bistochastic { assignment, delta, graduated } => {
                let norm = bistochastic_normalize_baseline(g, gp, *delta)?;
                match assignment {
                    Assignment::Linear => linear_assignment(norm.tables.c.view()),
                    Assignment::Quadratic => graduated_assignment(&norm.tables, g, gp, graduated),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub baseline: usize,
    pub method: Method,
    pub mean_loss: f64,
    pub stderr: f64,
    pub count: usize,
    /// Mean over test pairs of the median-of-repeats inference time.
    pub mean_runtime_ms: Option<f64>,
    pub lambda: Option<f64>,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedWeights {
    pub baseline: usize,
    pub method: Method,
    pub lambda: f64,
    pub w: Vec<f64>,
    pub validation_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub loss: LossKind,
    pub rows: Vec<ReportRow>,
    pub models: Vec<LearnedWeights>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn row(&self, baseline: usize, method: Method) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.baseline == baseline && r.method == method)
    }
}

/// Mean and standard error (sample standard deviation over `sqrt(count)`).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn instances_of(pairs: &[&PairInstance], split: Split) -> Vec<TrainingInstance> {
    pairs.iter().filter(|p| p.entry.split == split).map(|p| p.instance.clone()).collect()
}

fn check_split_hygiene(pairs: &[&PairInstance]) -> Result<()> {
    let key = |p: &&PairInstance| (p.entry.scene_a.clone(), p.entry.scene_b.clone());
    let train: HashSet<_> = pairs.iter().filter(|p| p.entry.split == Split::Train).map(key).collect();
    if let Some(p) = pairs.iter().filter(|p| p.entry.split == Split::Test).find(|p| train.contains(&key(p))) {
        return Err(Error::InvalidArgument(format!(
            "pair ({}, {}) is in both the training and the test split",
            p.entry.scene_a, p.entry.scene_b
        )));
    }
    Ok(())
}

/// Trains over the lambda grid and keeps the weights with the lowest
/// validation loss (first in grid order on ties).
pub fn select_by_validation(
    train_set: &[TrainingInstance],
    validation: &[TrainingInstance],
    assignment: Assignment,
    loss: &LossKind,
    cfg: &ExperimentConfig,
) -> Result<(LearnerConfigChoice, crate::learn::TrainerState)> {
    if train_set.is_empty() {
        return Err(Error::InvalidArgument("training split is empty".into()));
    }
    let inference = match assignment {
        Assignment::Linear => Inference::Linear,
        Assignment::Quadratic => Inference::Graduated(cfg.graduated.clone()),
    };
    let held_out = if validation.is_empty() { train_set } else { validation };
    let mut best: Option<(LearnerConfigChoice, crate::learn::TrainerState)> = None;
    for &lambda in &cfg.lambda_grid {
        let learner = LearnerConfig {
            lambda,
            epsilon: cfg.epsilon,
            max_iterations: cfg.max_iterations,
            inference: inference.clone(),
            loss: *loss,
        };
        let state = train(train_set, &learner)?;
        let (val, _) = prediction_risk(&state.w, held_out, loss, &inference)?;
        if best.as_ref().is_none_or(|(b, _)| val < b.validation_loss) {
            best = Some((LearnerConfigChoice { lambda, validation_loss: val }, state));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty lambda grid".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfigChoice {
    pub lambda: f64,
    pub validation_loss: f64,
}

fn time_matcher(matcher: &Matcher, instance: &TrainingInstance, repeats: usize) -> Result<(Matching, f64)> {
    let mut times = Vec::with_capacity(repeats.max(1));
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let y = matcher.run(instance)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        out = Some(y);
    }
    times.sort_by(f64::total_cmp);
    Ok((out.expect("ran at least once"), times[times.len() / 2]))
}

/// Test-split losses and per-pair inference times (ms) of one matcher.
pub fn evaluate_matcher(
    matcher: &Matcher,
    test: &[TrainingInstance],
    loss: &LossKind,
    cfg: &ExperimentConfig,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    if cfg.timing {
        // Sequential so that timings are not distorted by contention.
        let mut losses = Vec::with_capacity(test.len());
        let mut times = Vec::with_capacity(test.len());
        for inst in test {
            let (y, ms) = time_matcher(matcher, inst, cfg.timing_repeats)?;
            losses.push(loss.evaluate(inst, &y)?);
            times.push(ms);
        }
        Ok((losses, Some(times)))
    } else {
        let losses =
            test.par_iter().map(|inst| loss.evaluate(inst, &matcher.run(inst)?)).collect::<Result<Vec<_>>>()?;
        Ok((losses, None))
    }
}

/// Runs every method on every baseline of `pairs`: learned methods train on
/// the training split and pick lambda on the validation split; all methods
/// report test-split loss.
pub fn run_experiment(
    pairs: &[PairInstance],
    loss: &LossKind,
    methods: &[Method],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    let mut baselines: Vec<usize> = pairs.iter().map(|p| p.entry.baseline).collect();
    baselines.sort_unstable();
    baselines.dedup();
    let attr_dim = pairs.first().ok_or_else(|| Error::InvalidArgument("no pairs".into()))?.instance.attr_dim();

    let mut rows = Vec::new();
    let mut models = Vec::new();
    for &baseline in &baselines {
        let group: Vec<&PairInstance> = pairs.iter().filter(|p| p.entry.baseline == baseline).collect();
        check_split_hygiene(&group)?;
        let train_set = instances_of(&group, Split::Train);
        let validation = instances_of(&group, Split::Validation);
        let test = instances_of(&group, Split::Test);
        if test.is_empty() {
            return Err(Error::InvalidArgument(format!("baseline {baseline} has no test pairs")));
        }
        for &method in methods {
            let mut lambda = None;
            let mut converged = None;
            let matcher = match method.weighting {
                Weighting::Learned => {
                    let (choice, state) = select_by_validation(&train_set, &validation, method.assignment, loss, cfg)?;
                    lambda = Some(choice.lambda);
                    converged = Some(state.converged);
                    models.push(LearnedWeights {
                        baseline,
                        method,
                        lambda: choice.lambda,
                        w: state.w.to_vec(),
                        validation_loss: choice.validation_loss,
                    });
                    Matcher::for_weights(state.w, method.assignment, &cfg.graduated)
                }
                Weighting::Unlearned => {
                    let w2 = match method.assignment {
                        Assignment::Linear => 0.0,
                        Assignment::Quadratic => 1.0,
                    };
                    Matcher::for_weights(WeightVector::flat(attr_dim, w2), method.assignment, &cfg.graduated)
                }
                Weighting::Bistochastic => Matcher::Bistochastic {
                    assignment: method.assignment,
                    delta: cfg.bistochastic_delta,
                    graduated: cfg.graduated.clone(),
                },
            };
            let (losses, times) = evaluate_matcher(&matcher, &test, loss, cfg)?;
            let (mean_loss, stderr) = mean_and_stderr(&losses);
            rows.push(ReportRow {
                baseline,
                method,
                mean_loss,
                stderr,
                count: losses.len(),
                mean_runtime_ms: times.map(|t| t.iter().sum::<f64>() / t.len() as f64),
                lambda,
                converged,
            });
        }
    }
    Ok(ExperimentReport { loss: *loss, rows, models })
}

/// Test-split report of a fixed, already trained weight vector on every
/// baseline of `pairs`. Rows are labelled as the learned method of the
/// model's assignment.
pub fn evaluate_model(
    pairs: &[PairInstance],
    loss: &LossKind,
    w: &WeightVector,
    assignment: Assignment,
    lambda: Option<f64>,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    let mut baselines: Vec<usize> = pairs.iter().map(|p| p.entry.baseline).collect();
    baselines.sort_unstable();
    baselines.dedup();
    if baselines.is_empty() {
        return Err(Error::InvalidArgument("no pairs".into()));
    }
    let matcher = Matcher::for_weights(w.clone(), assignment, &cfg.graduated);
    let mut rows = Vec::new();
    for baseline in baselines {
        let group: Vec<&PairInstance> = pairs.iter().filter(|p| p.entry.baseline == baseline).collect();
        let test = instances_of(&group, Split::Test);
        if test.is_empty() {
            return Err(Error::InvalidArgument(format!("baseline {baseline} has no test pairs")));
        }
        let (losses, times) = evaluate_matcher(&matcher, &test, loss, cfg)?;
        let (mean_loss, stderr) = mean_and_stderr(&losses);
        rows.push(ReportRow {
            baseline,
            method: Method::new(assignment, Weighting::Learned),
            mean_loss,
            stderr,
            count: losses.len(),
            mean_runtime_ms: times.map(|t| t.iter().sum::<f64>() / t.len() as f64),
            lambda,
            converged: None,
        });
    }
    Ok(ExperimentReport { loss: *loss, rows, models: Vec::new() })
}
