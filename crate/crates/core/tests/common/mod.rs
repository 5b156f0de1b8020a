//! Shared property-suite bodies, used both by the focused integration tests
//! and by the acceptance gate.

// each test binary uses its own subset of the suites
#![allow(dead_code)]

use mixpul::baselines::{nnpu_risk, risk_gradients, upu_risk, RiskKind};
use mixpul::eval::{auc, pu_auc_identity_check};
use mixpul::linalg::Matrix;
use mixpul::mixpul::{
    build_mixed_pn, build_mixed_unlabeled, random_permutation, total_loss, MixedBatch,
};
use mixpul::nn::{Gradients, MlpModel};
use mixpul::rng;
use rand::Rng as _;

const STEP: f64 = 1e-5;
const REL_TOL: f64 = 1e-4;

fn random_matrix(rows: usize, cols: usize, r: &mut rng::Rng) -> Matrix {
    Matrix::from_vec(
        rows,
        cols,
        (0..rows * cols).map(|_| r.random_range(-2.0..2.0)).collect(),
    )
    .unwrap()
}

fn get_param(model: &MlpModel, mut idx: usize) -> f64 {
    for layer in model.layers() {
        let nw = layer.weights.data().len();
        if idx < nw {
            return layer.weights.data()[idx];
        }
        idx -= nw;
        if idx < layer.bias.len() {
            return layer.bias[idx];
        }
        idx -= layer.bias.len();
    }
    unreachable!("parameter index out of range")
}

fn set_param(model: &mut MlpModel, mut idx: usize, value: f64) {
    for layer in model.layers_mut() {
        let nw = layer.weights.data().len();
        if idx < nw {
            layer.weights.data_mut()[idx] = value;
            return;
        }
        idx -= nw;
        if idx < layer.bias.len() {
            layer.bias[idx] = value;
            return;
        }
        idx -= layer.bias.len();
    }
    unreachable!("parameter index out of range")
}

fn grad_param(grads: &Gradients, mut idx: usize) -> f64 {
    for layer in &grads.layers {
        let nw = layer.weights.data().len();
        if idx < nw {
            return layer.weights.data()[idx];
        }
        idx -= nw;
        if idx < layer.bias.len() {
            return layer.bias[idx];
        }
        idx -= layer.bias.len();
    }
    unreachable!("parameter index out of range")
}

/// Compare analytic gradients against central differences of `value`.
fn check_gradients(
    label: &str,
    model: &MlpModel,
    grads: &Gradients,
    value: &mut dyn FnMut(&MlpModel) -> f64,
) {
    let mut probe = model.clone();
    for idx in 0..model.param_count() {
        let original = get_param(model, idx);
        set_param(&mut probe, idx, original + STEP);
        let plus = value(&probe);
        set_param(&mut probe, idx, original - STEP);
        let minus = value(&probe);
        set_param(&mut probe, idx, original);
        let fd = (plus - minus) / (2.0 * STEP);
        let analytic = grad_param(grads, idx);
        let denom = analytic.abs().max(fd.abs());
        let ok = if denom < 1e-8 {
            (analytic - fd).abs() <= 1e-10
        } else {
            (analytic - fd).abs() / denom <= REL_TOL
        };
        assert!(
            ok,
            "{label}: param {idx}: analytic {analytic} vs finite-diff {fd}"
        );
    }
}

struct Instance {
    model: MlpModel,
    pn: MixedBatch,
    u: MixedBatch,
    x_p: Matrix,
    x_u: Matrix,
    beta: f64,
    gamma: f64,
    eta: f64,
    pi: f64,
}

fn random_instance(seed: u64) -> Instance {
    let mut r = rng::from_seed(seed);
    let dim = r.random_range(2..=5);
    let mut dims = vec![dim];
    for _ in 0..r.random_range(1..=2usize) {
        dims.push(r.random_range(2..=16));
    }
    dims.push(1);
    let model = MlpModel::new(&dims, &mut r).unwrap();
    let bp = r.random_range(2..=4);
    let bu = r.random_range(2..=5);
    let x_p = random_matrix(bp, dim, &mut r);
    let x_n = random_matrix(bp, dim, &mut r);
    let x_u = random_matrix(bu, dim, &mut r);
    let lambda = r.random_range(0.1..0.9);
    let perm_pn = random_permutation(bp, &mut r);
    let pn = build_mixed_pn(&x_p, &x_n, lambda, &perm_pn).unwrap();
    let soft: Vec<f64> = (0..bu).map(|_| r.random_range(0.05..0.95)).collect();
    let perm_u = random_permutation(bu, &mut r);
    let u = build_mixed_unlabeled(&x_u, &soft, lambda, &perm_u).unwrap();
    Instance {
        model,
        pn,
        u,
        x_p,
        x_u,
        beta: r.random_range(0.2..1.5),
        gamma: r.random_range(0.2..1.5),
        eta: r.random_range(0.05..0.3),
        pi: r.random_range(0.05..0.95),
    }
}

/// Finite-difference checks for the consistency terms, the margin term, and
/// the full weighted objective, across random small models.
pub fn consistency_margin_gradient_suite(models: u64) {
    for seed in 0..models {
        let inst = random_instance(seed);
        let cases: [(&str, f64, f64, bool); 4] = [
            ("L_PN", 0.0, 0.0, false),
            ("L_PN + L_U", inst.beta, 0.0, true),
            ("L_PN + L_PU", 0.0, inst.gamma, false),
            ("total", inst.beta, inst.gamma, true),
        ];
        for (label, beta, gamma, with_u) in cases {
            let u = if with_u { Some(&inst.u) } else { None };
            let (_, grads) =
                total_loss(&inst.model, &inst.pn, u, &inst.x_p, &inst.x_u, beta, gamma, inst.eta)
                    .unwrap();
            check_gradients(label, &inst.model, &grads, &mut |m| {
                total_loss(m, &inst.pn, u, &inst.x_p, &inst.x_u, beta, gamma, inst.eta)
                    .unwrap()
                    .0
                    .total
            });
        }
    }
}

/// Finite-difference checks for the uPU and nnPU risk gradients.
pub fn risk_gradient_suite(models: u64) {
    let mut open_seen = 0;
    for seed in 100..100 + models {
        let inst = random_instance(seed);
        for kind in [RiskKind::Upu, RiskKind::Nnpu] {
            let (risk, grads) =
                risk_gradients(&inst.model, &inst.x_p, &inst.x_u, inst.pi, kind).unwrap();
            let upu = {
                let zp = inst.model.forward_logits(&inst.x_p).unwrap();
                let zu = inst.model.forward_logits(&inst.x_u).unwrap();
                upu_risk(&zp, &zu, inst.pi)
            };
            if kind == RiskKind::Nnpu && risk == upu {
                open_seen += 1;
            }
            check_gradients(&format!("{kind:?}"), &inst.model, &grads, &mut |m| {
                let zp = m.forward_logits(&inst.x_p).unwrap();
                let zu = m.forward_logits(&inst.x_u).unwrap();
                match kind {
                    RiskKind::Upu => upu_risk(&zp, &zu, inst.pi),
                    RiskKind::Nnpu => nnpu_risk(&zp, &zu, inst.pi),
                }
            });
        }
    }
    assert!(open_seen > 0, "no unclamped nnPU instance in the sample");
}

/// Independent oracle: O(n^2) enumeration of (positive, negative) pairs,
/// ties worth one half.
pub fn brute_force_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut correct = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                correct += 1.0;
            } else if si == sj {
                correct += 0.5;
            }
        }
    }
    correct / pairs
}

/// Sort-based AUC equals the brute-force pair count on random instances,
/// a third of them tie-heavy.
pub fn auc_oracle_suite(cases: usize, max_n: usize) {
    let mut r = rng::from_seed(7);
    for case in 0..cases {
        let n = r.random_range(2..=max_n);
        let levels = match case % 3 {
            0 => 0,
            1 => r.random_range(2..=5),
            _ => r.random_range(6..=20),
        };
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                let s = r.random_range(0.0..1.0);
                if levels == 0 {
                    s
                } else {
                    (s * levels as f64).floor() / levels as f64
                }
            })
            .collect();
        let mut labels: Vec<u8> = (0..n).map(|_| u8::from(r.random_bool(0.5))).collect();
        labels[0] = 1;
        labels[1] = 0;
        let fast = auc(&scores, &labels).unwrap();
        let slow = brute_force_auc(&scores, &labels);
        assert!(
            (fast - slow).abs() < 1e-12,
            "case {case} (n={n}, levels={levels}): {fast} vs {slow}"
        );
    }
}

/// Residual of `R_PU = (1 - pi) R_PN + pi / 2` on synthetic score mixtures.
pub fn identity_suite(seeds: u64, n: usize, tolerance: f64) {
    for seed in 0..seeds {
        let mut r = rng::from_seed(1000 + seed);
        let pi = r.random_range(0.1..0.9);
        let pos_score = |r: &mut rng::Rng| 0.6 + 0.3 * r.random_range(-1.0f64..1.0);
        let neg_score = |r: &mut rng::Rng| 0.4 + 0.3 * r.random_range(-1.0f64..1.0);
        let pos_scores: Vec<f64> = (0..n).map(|_| pos_score(&mut r)).collect();
        let mut unl_scores = Vec::with_capacity(n);
        let mut unl_labels = Vec::with_capacity(n);
        for _ in 0..n {
            if r.random_bool(pi) {
                unl_scores.push(pos_score(&mut r));
                unl_labels.push(1u8);
            } else {
                unl_scores.push(neg_score(&mut r));
                unl_labels.push(0u8);
            }
        }
        // the empirical mixture rate, not the nominal pi, drives the identity
        let realized_pi =
            unl_labels.iter().filter(|&&y| y == 1).count() as f64 / unl_labels.len() as f64;
        let check =
            pu_auc_identity_check(&pos_scores, &unl_scores, &unl_labels, realized_pi).unwrap();
        assert!(
            check.residual.abs() <= tolerance,
            "seed {seed}: residual {} (R_PU={}, R_PN={}, pi={realized_pi})",
            check.residual,
            check.r_pu,
            check.r_pn
        );
    }
}

/// nnPU is nonnegative on random model/batch draws and coincides with uPU
/// exactly whenever the clamp is inactive.
pub fn nnpu_nonnegativity_suite(draws: usize) {
    let mut r = rng::from_seed(42);
    let models: Vec<MlpModel> = (0..50)
        .map(|_| {
            let dim = r.random_range(1..=4);
            let width = r.random_range(2..=8);
            MlpModel::new(&[dim, width, 1], &mut r).unwrap()
        })
        .collect();
    let mut clamped = 0usize;
    for draw in 0..draws {
        let model = &models[r.random_range(0..models.len())];
        let dim = model.input_dim();
        let np = r.random_range(1..=6);
        let nu = r.random_range(1..=6);
        let sample = |n: usize, r: &mut rng::Rng| {
            Matrix::from_vec(n, dim, (0..n * dim).map(|_| r.random_range(-4.0..4.0)).collect())
                .unwrap()
        };
        let zp = model.forward_logits(&sample(np, &mut r)).unwrap();
        let zu = model.forward_logits(&sample(nu, &mut r)).unwrap();
        let pi = r.random_range(0.01..0.99);
        let upu = upu_risk(&zp, &zu, pi);
        let nnpu = nnpu_risk(&zp, &zu, pi);
        assert!(nnpu >= 0.0, "draw {draw}: nnpu {nnpu} negative");
        if upu < nnpu {
            clamped += 1;
        } else {
            assert!(
                nnpu == upu,
                "draw {draw}: clamp inactive but nnpu {nnpu} != upu {upu}"
            );
        }
    }
    assert!(clamped > 0, "clamp never exercised across the sample");
    assert!(clamped < draws, "clamp always active across the sample");
}

/// Mixed batches interpolate inputs and targets exactly, endpoints are
/// copies, and positive/negative targets are constant lambda.
pub fn mixup_exactness_suite(cases: u64) {
    let mut r = rng::from_seed(77);
    for _ in 0..cases {
        let rows = r.random_range(1..=6);
        let cols = r.random_range(1..=5);
        let x = random_matrix(rows, cols, &mut r);
        let soft: Vec<f64> = (0..rows).map(|_| r.random_range(0.0..1.0)).collect();
        let perm = random_permutation(rows, &mut r);
        for lambda in [0.0, 1.0, r.random_range(0.0..1.0)] {
            let batch = build_mixed_unlabeled(&x, &soft, lambda, &perm).unwrap();
            for i in 0..rows {
                for j in 0..cols {
                    let expect = lambda * x.get(i, j) + (1.0 - lambda) * x.get(perm[i], j);
                    assert_eq!(batch.inputs.get(i, j), expect);
                }
                assert_eq!(
                    batch.targets[i],
                    lambda * soft[i] + (1.0 - lambda) * soft[perm[i]]
                );
            }
        }
        // endpoints are exact copies
        let at_one = build_mixed_unlabeled(&x, &soft, 1.0, &perm).unwrap();
        assert_eq!(at_one.inputs.data(), x.data());
        assert_eq!(at_one.targets, soft);
        let at_zero = build_mixed_unlabeled(&x, &soft, 0.0, &perm).unwrap();
        for i in 0..rows {
            assert_eq!(at_zero.inputs.row(i), x.row(perm[i]));
            assert_eq!(at_zero.targets[i], soft[perm[i]]);
        }
        // positive/negative mixing pins every target at lambda
        let x_n = random_matrix(rows, cols, &mut r);
        let lambda = r.random_range(0.0..1.0);
        let pn = build_mixed_pn(&x, &x_n, lambda, &perm).unwrap();
        assert!(pn.targets.iter().all(|&t| t == lambda));
    }
}
