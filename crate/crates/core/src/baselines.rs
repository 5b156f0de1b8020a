//! Risk-estimator baselines trained on the real-valued score head with the
//! sigmoid surrogate `l(z) = sigmoid(-z)`: the unbiased PU risk (uPU), its
//! nonnegative correction (nnPU), and a fully supervised squared-error
//! reference fit to the observed labels.

use crate::config::TrainConfig;
use crate::data::{BatchPlan, LabeledDataset, PUDataset};
use crate::error::{Error, Result};
use crate::eval::{auc, error_rate};
use crate::nn::{sigmoid, Gradients, MlpModel, OptimizerState};
use crate::report::{EpochRecord, RunReport};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskKind {
    Upu,
    Nnpu,
}

/// A finished baseline run. Baselines carry no teacher; the student itself
/// is evaluated.
#[derive(Debug, Clone)]
pub struct TrainedBaseline {
    pub model: MlpModel,
    pub report: RunReport,
}

/// Surrogate loss on the score head: `l(z) = sigmoid(-z)`.
pub fn surrogate(z: f64) -> f64 {
    sigmoid(-z)
}

fn mean_surrogate(logits: &[f64], sign: f64) -> f64 {
    logits.iter().map(|&z| surrogate(sign * z)).sum::<f64>() / logits.len() as f64
}

/// Unbiased PU risk: `pi * R_P^+ + R_U^- - pi * R_P^-` where `R^+` uses
/// `l(z)` and `R^-` uses `l(-z)`.
pub fn upu_risk(pos_logits: &[f64], unl_logits: &[f64], pi: f64) -> f64 {
    pi * mean_surrogate(pos_logits, 1.0) + negative_bracket(pos_logits, unl_logits, pi)
}

/// The estimated negative-class risk `R_U^- - pi * R_P^-`; the term the
/// nonnegative correction clamps.
fn negative_bracket(pos_logits: &[f64], unl_logits: &[f64], pi: f64) -> f64 {
    mean_surrogate(unl_logits, -1.0) - pi * mean_surrogate(pos_logits, -1.0)
}

/// Nonnegative PU risk: the negative bracket is clamped at zero.
pub fn nnpu_risk(pos_logits: &[f64], unl_logits: &[f64], pi: f64) -> f64 {
    pi * mean_surrogate(pos_logits, 1.0) + negative_bracket(pos_logits, unl_logits, pi).max(0.0)
}

/// Risk value and parameter gradients for one batch. With `RiskKind::Nnpu`
/// and a negative bracket, the step instead descends `-bracket` alone, so
/// the model backs out of the over-fit region.
pub fn risk_gradients(
    model: &MlpModel,
    x_p: &crate::linalg::Matrix,
    x_u: &crate::linalg::Matrix,
    pi: f64,
    kind: RiskKind,
) -> Result<(f64, Gradients)> {
    let cache_p = model.forward_cache(x_p)?;
    let cache_u = model.forward_cache(x_u)?;
    let bracket = negative_bracket(&cache_p.logits, &cache_u.logits, pi);
    let risk = match kind {
        RiskKind::Upu => pi * mean_surrogate(&cache_p.logits, 1.0) + bracket,
        RiskKind::Nnpu => pi * mean_surrogate(&cache_p.logits, 1.0) + bracket.max(0.0),
    };
    if !risk.is_finite() {
        return Err(Error::Divergence(format!("non-finite risk {risk}")));
    }
    let np = cache_p.logits.len() as f64;
    let nu = cache_u.logits.len() as f64;
    // d/dz l(z) = -sigmoid(z) sigmoid(-z); d/dz l(-z) = +sigmoid(z) sigmoid(-z)
    let sig = |z: f64| sigmoid(z) * sigmoid(-z);
    let clamped = kind == RiskKind::Nnpu && bracket < 0.0;
    let (grad_p, grad_u): (Vec<f64>, Vec<f64>) = if clamped {
        // gradient of -bracket
        (
            cache_p.logits.iter().map(|&z| -pi / np * sig(z) * -1.0).collect(),
            cache_u.logits.iter().map(|&z| -sig(z) / nu).collect(),
        )
    } else {
        (
            cache_p
                .logits
                .iter()
                .map(|&z| -pi / np * sig(z) - pi / np * sig(z))
                .collect(),
            cache_u.logits.iter().map(|&z| sig(z) / nu).collect(),
        )
    };
    let mut grads = Gradients::zeros_like(model);
    model.backward_logits(&cache_p, &grad_p, &mut grads)?;
    model.backward_logits(&cache_u, &grad_u, &mut grads)?;
    Ok((risk, grads))
}

/// The class prior handed to the risk estimators: the configured value (or
/// the construction's true prior) scaled by the misspecification factor.
pub fn effective_prior(pu: &PUDataset, config: &TrainConfig) -> Result<f64> {
    let pi = config.pi.unwrap_or_else(|| pu.class_prior()) * config.pi_multiplier;
    if !(pi > 0.0) || !pi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "effective class prior {pi} must be positive"
        )));
    }
    Ok(pi)
}

/// Train a uPU or nnPU model; threshold for error metrics is logit 0
/// (score 0.5).
pub fn train_risk(
    pu: &PUDataset,
    test: &LabeledDataset,
    config: &TrainConfig,
    kind: RiskKind,
) -> Result<TrainedBaseline> {
    config.validate()?;
    if test.dim() != pu.dim() {
        return Err(Error::shape(
            format!("{} features", pu.dim()),
            format!("{} features", test.dim()),
            "baseline test set",
        ));
    }
    let pi = effective_prior(pu, config)?;
    let mut init_rng = rng::stream(config.seed, Stream::Init);
    let mut batch_rng = rng::stream(config.seed, Stream::Batches);
    let mut model = MlpModel::new(&config.dims(pu.dim()), &mut init_rng)?;
    let mut optimizer = OptimizerState::new(config.sgd(), &model)?;
    let mut report = RunReport::default();
    // positives double as the "negative" slot; risk training ignores x_n
    let rn_stub = pu.unlabeled_indices().to_vec();

    'epochs: for epoch in 0..config.epochs {
        let mut plan = BatchPlan::new(pu, config.batch_size, &mut batch_rng)?;
        let steps = plan.steps();
        let mut risk_sum = 0.0;
        for _ in 0..steps {
            let batch = plan.next(pu, &rn_stub, &mut batch_rng)?;
            let step = risk_gradients(&model, &batch.x_p, &batch.x_u, pi, kind)
                .and_then(|(risk, grads)| {
                    optimizer.step(&mut model, &grads)?;
                    Ok(risk)
                });
            match step {
                Ok(risk) => risk_sum += risk,
                Err(Error::Divergence(msg)) => {
                    report.diverged = Some(format!("epoch {epoch}: {msg}"));
                    break 'epochs;
                }
                Err(e) => return Err(e),
            }
        }
        report
            .epochs
            .push(evaluate_epoch(epoch, risk_sum / steps as f64, &model, pu, test)?);
    }
    Ok(TrainedBaseline { model, report })
}

/// Squared-error reference fit to the observed labels `s` (labeled positives
/// against everything else), batching uniformly over all rows.
pub fn train_supervised(
    pu: &PUDataset,
    test: &LabeledDataset,
    config: &TrainConfig,
) -> Result<TrainedBaseline> {
    config.validate()?;
    if test.dim() != pu.dim() {
        return Err(Error::shape(
            format!("{} features", pu.dim()),
            format!("{} features", test.dim()),
            "baseline test set",
        ));
    }
    let mut init_rng = rng::stream(config.seed, Stream::Init);
    let mut batch_rng = rng::stream(config.seed, Stream::Batches);
    let mut model = MlpModel::new(&config.dims(pu.dim()), &mut init_rng)?;
    let mut optimizer = OptimizerState::new(config.sgd(), &model)?;
    let mut report = RunReport::default();
    let n = pu.len();

    'epochs: for epoch in 0..config.epochs {
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut batch_rng);
        let mut loss_sum = 0.0;
        let mut steps = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let x = pu.features.select_rows(chunk);
            let cache = model.forward_cache(&x)?;
            let b = chunk.len() as f64;
            let mut loss = 0.0;
            let upstream: Vec<f64> = cache
                .scores
                .iter()
                .zip(chunk)
                .map(|(&p, &i)| {
                    let t = f64::from(pu.observed_labels()[i]);
                    loss += (p - t) * (p - t);
                    2.0 * (p - t) / b
                })
                .collect();
            loss /= b;
            let mut grads = Gradients::zeros_like(&model);
            model.backward(&cache, &upstream, &mut grads)?;
            if let Err(Error::Divergence(msg)) = optimizer.step(&mut model, &grads) {
                report.diverged = Some(format!("epoch {epoch}: {msg}"));
                break 'epochs;
            }
            loss_sum += loss;
            steps += 1;
        }
        report
            .epochs
            .push(evaluate_epoch(epoch, loss_sum / steps as f64, &model, pu, test)?);
    }
    Ok(TrainedBaseline { model, report })
}

fn evaluate_epoch(
    epoch: usize,
    objective: f64,
    model: &MlpModel,
    pu: &PUDataset,
    test: &LabeledDataset,
) -> Result<EpochRecord> {
    let train_scores = model.forward(&pu.features)?;
    let test_scores = model.forward(&test.features)?;
    Ok(EpochRecord {
        epoch,
        loss_pn: objective,
        loss_u: 0.0,
        loss_pu: 0.0,
        train_error: error_rate(&train_scores, pu.hidden_labels(), 0.5)?,
        test_error: error_rate(&test_scores, &test.labels, 0.5)?,
        test_auc: auc(&test_scores, &test.labels)?,
    })
}
