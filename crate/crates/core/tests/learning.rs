mod common;

use common::*;
use graphmatch::features::joint_feature;
use graphmatch::learn::{
    build_augmented_tables, empirical_risk_and_subgradient, most_violated, prediction_risk,
    regularized_risk_and_subgradient, train, Inference, LearnerConfig,
};
use graphmatch::loss::{assignment_loss_table, endpoint_loss, hamming_loss, EndpointLoss, LossKind};
use graphmatch::{objective_value, AttributedGraph, Matching, TrainingInstance, WeightVector};
use ndarray::array;
use rand::Rng;

fn losses() -> Vec<LossKind> {
    let e = EndpointLoss::new(100.0).unwrap();
    vec![
        LossKind::Hamming,
        LossKind::Endpoint(e),
        LossKind::Endpoint(EndpointLoss { clamp: false, ..e }),
        LossKind::Endpoint(EndpointLoss { literal: true, ..e }),
    ]
}

#[test]
fn hamming_takes_values_on_the_lattice() {
    let mut r = rng(20);
    for _ in 0..200 {
        let n = r.gen_range(1..=9);
        let m = r.gen_range(n..=10);
        let y = random_injection(&mut r, n, m);
        let t = random_injection(&mut r, n, m);
        let l = hamming_loss(&y, &t).unwrap();
        let k = (l * n as f64).round();
        assert!((l * n as f64 - k).abs() < 1e-12 && (0.0..=1.0).contains(&l));
        assert_eq!(l, hamming_oracle(y.as_slice(), t.as_slice()));
    }
    assert!(hamming_loss(&Matching::identity(3), &Matching::identity(4)).is_err());
}

#[test]
fn endpoint_loss_is_translation_invariant_and_bounded() {
    let mut r = rng(21);
    for _ in 0..100 {
        let n = r.gen_range(1..=8);
        let targets = random_points(&mut r, n + 2);
        let truth = random_points(&mut r, n);
        let y = random_injection(&mut r, n, n + 2);
        let sigma = r.gen_range(5.0..80.0);
        let l = endpoint_loss(&y, &truth, &targets, sigma).unwrap();
        assert!((0.0..=1.0).contains(&l));
        let (dx, dy) = (r.gen_range(-1e3..1e3), r.gen_range(-1e3..1e3));
        let shift = |p: &[[f64; 2]]| p.iter().map(|q| [q[0] + dx, q[1] + dy]).collect::<Vec<_>>();
        let ls = endpoint_loss(&y, &shift(&truth), &shift(&targets), sigma).unwrap();
        assert!((l - ls).abs() < 1e-9);
    }
}

#[test]
fn loss_table_decomposes_every_matching() {
    let mut r = rng(22);
    for _ in 0..50 {
        let n = r.gen_range(1..=4);
        let m = r.gen_range(n..=5);
        let inst = random_instance(&mut r, n, m, 2);
        for loss in losses() {
            let (table, k) = assignment_loss_table(&loss, &inst).unwrap();
            for map in injections(n, m) {
                let y = Matching::new(map.clone(), m).unwrap();
                let via_table: f64 = map.iter().enumerate().map(|(i, &j)| table[[i, j]]).sum::<f64>() + k;
                assert!(close(via_table, loss.evaluate(&inst, &y).unwrap(), 1e-12));
            }
        }
    }
}

#[test]
fn augmented_objective_is_score_plus_loss() {
    let mut r = rng(23);
    for _ in 0..100 {
        let n = r.gen_range(1..=6);
        let m = r.gen_range(n..=7);
        let inst = random_instance(&mut r, n, m, 3);
        let w2 = r.gen_range(-1.0..1.0);
        let w = random_weights(&mut r, 3, w2);
        for loss in losses() {
            let aug = build_augmented_tables(&w, &inst, &loss).unwrap();
            let y = random_injection(&mut r, n, m);
            let got = objective_value(&aug.tables, &inst.g, &inst.g_prime, &y).unwrap() + aug.constant;
            let want = dot(&joint_feature_oracle(&inst.g, &inst.g_prime, y.as_slice()), &w.to_vec())
                + loss.evaluate(&inst, &y).unwrap();
            assert!(close(got, want, 1e-10), "{got} vs {want}");
        }
    }
}

#[test]
fn most_violated_matches_exhaustive_search() {
    let mut r = rng(24);
    for _ in 0..60 {
        let n = r.gen_range(1..=5);
        let m = r.gen_range(n..=6);
        let inst = random_instance(&mut r, n, m, 3);
        let w = random_weights(&mut r, 3, 0.0);
        let wv = w.to_vec();
        let truth = joint_feature_oracle(&inst.g, &inst.g_prime, inst.y_true.as_slice());
        for loss in losses() {
            let best = injections(n, m)
                .iter()
                .map(|map| {
                    let y = Matching::new(map.clone(), m).unwrap();
                    dot(&joint_feature_oracle(&inst.g, &inst.g_prime, map), &wv) + loss.evaluate(&inst, &y).unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let mv = most_violated(&w, &inst, &loss, &Inference::Linear).unwrap();
            assert!(close(mv.violation, best - dot(&truth, &wv), 1e-10));
        }
    }
}

#[test]
fn linear_inference_rejects_edge_weight() {
    let mut r = rng(25);
    let inst = random_instance(&mut r, 3, 4, 2);
    let w = random_weights(&mut r, 2, 0.5);
    assert!(most_violated(&w, &inst, &LossKind::Hamming, &Inference::Linear).is_err());
}

fn small_set(seed: u64, count: usize) -> Vec<TrainingInstance> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(3..=5);
            random_instance(&mut r, n, n + 1, 4)
        })
        .collect()
}

/// Subgradient against a central difference at points where the risk is
/// differentiable (forward and backward slopes agree).
#[test]
fn subgradient_matches_finite_differences() {
    let data = small_set(26, 6);
    let mut r = rng(27);
    let h = 1e-5;
    let lambda = 0.1;
    let mut checked = 0;
    for _ in 0..200 {
        if checked == 10 {
            break;
        }
        let w = random_weights(&mut r, 4, 0.0);
        let f = |w: &WeightVector| {
            regularized_risk_and_subgradient(w, &data, &LossKind::Hamming, &Inference::Linear, lambda).unwrap().0
        };
        let (f0, grad) =
            regularized_risk_and_subgradient(&w, &data, &LossKind::Hamming, &Inference::Linear, lambda).unwrap();
        let mut smooth = true;
        let mut fds = Vec::new();
        for k in 0..4 {
            let mut wp = w.clone();
            wp.w1[k] += h;
            let mut wm = w.clone();
            wm.w1[k] -= h;
            let (fp, fm) = (f(&wp), f(&wm));
            let (fwd, bwd) = ((fp - f0) / h, (f0 - fm) / h);
            if (fwd - bwd).abs() > 1e-3 * (1.0 + fwd.abs()) {
                smooth = false;
                break;
            }
            fds.push((fp - fm) / (2.0 * h));
        }
        if !smooth {
            continue;
        }
        for (k, fd) in fds.iter().enumerate() {
            assert!((fd - grad[k]).abs() <= 1e-4 * fd.abs().max(grad[k].abs()) + 1e-9, "{fd} vs {}", grad[k]);
        }
        checked += 1;
    }
    assert_eq!(checked, 10);
}

#[test]
fn regularized_risk_is_convex_and_planes_are_lower_bounds() {
    let data = small_set(28, 5);
    let mut r = rng(29);
    let lambda = 0.5;
    let risk = |w: &WeightVector| {
        regularized_risk_and_subgradient(w, &data, &LossKind::Hamming, &Inference::Linear, lambda).unwrap().0
    };
    for _ in 0..30 {
        let a = random_weights(&mut r, 4, 0.0);
        let b = random_weights(&mut r, 4, 0.0);
        let t = r.gen_range(0.0..1.0);
        let mix = WeightVector::new(&a.w1 * t + &b.w1 * (1.0 - t), 0.0).unwrap();
        assert!(risk(&mix) <= t * risk(&a) + (1.0 - t) * risk(&b) + 1e-12);
    }

    let state = train(&data, &LearnerConfig::new(lambda, Inference::Linear, LossKind::Hamming)).unwrap();
    assert!(!state.cutting_planes.is_empty());
    for _ in 0..30 {
        let w = random_weights(&mut r, 4, 0.0);
        let emp = empirical_risk_and_subgradient(&w, &data, &LossKind::Hamming, &Inference::Linear).unwrap();
        for plane in &state.cutting_planes {
            assert!(plane.value_at(&w.to_vec()) <= emp.value + 1e-10);
        }
    }
}

#[test]
fn training_runs_satisfy_the_slack_bound_and_converge() {
    for (seed, loss) in [(30, LossKind::Hamming), (31, LossKind::Endpoint(EndpointLoss::new(100.0).unwrap()))] {
        let data = small_set(seed, 8);
        for lambda in [0.01, 1.0, 100.0] {
            let state = train(&data, &LearnerConfig::new(lambda, Inference::Linear, loss)).unwrap();
            assert!(state.converged);
            assert!(state.history.iter().all(|h| h.bound_holds));
            for pair in state.history.windows(2) {
                assert!(pair[1].upper_bound <= pair[0].upper_bound);
                assert!(pair[1].lower_bound >= pair[0].lower_bound - 1e-8);
            }
            let last = state.history.last().unwrap();
            assert!(last.gap <= 1e-3 && last.gap >= -1e-8);
            let (emp, _) = prediction_risk(&state.w, &data, &loss, &Inference::Linear).unwrap();
            assert!(state.slack_mean() + 1e-9 >= emp);
            assert!(state.risk_upper_bound + 1e-12 >= state.slack_mean());
            assert_eq!(state.w.w2, 0.0);
        }
    }
}

#[test]
fn single_one_by_one_instance_terminates() {
    let g = AttributedGraph::without_edges(vec![[0.0, 0.0]], array![[0.3, 0.1]]).unwrap();
    let gp = AttributedGraph::without_edges(vec![[1.0, 1.0]], array![[0.2, 0.4]]).unwrap();
    let inst = TrainingInstance::new(g, gp, Matching::identity(1), 10.0).unwrap();
    let state = train(&[inst], &LearnerConfig::new(1.0, Inference::Linear, LossKind::Hamming)).unwrap();
    assert!(state.converged);
    assert!(state.history.len() <= 2);
    assert_eq!(state.empirical_risk, 0.0);
}

#[test]
fn quadratic_training_stays_finite() {
    let data = small_set(32, 4);
    let state = train(&data, &LearnerConfig::new(1.0, Inference::graduated(), LossKind::Hamming)).unwrap();
    assert!(state.risk_upper_bound.is_finite());
    assert!(state.w.to_vec().iter().all(|v| v.is_finite()));
    let joint = joint_feature(&data[0].g, &data[0].g_prime, &data[0].y_true).unwrap();
    assert!(joint.dot(&state.w).is_finite());
}

#[test]
fn training_rejects_bad_configs() {
    let data = small_set(33, 2);
    assert!(train(&data, &LearnerConfig::new(0.0, Inference::Linear, LossKind::Hamming)).is_err());
    assert!(train(&[], &LearnerConfig::new(1.0, Inference::Linear, LossKind::Hamming)).is_err());
}
