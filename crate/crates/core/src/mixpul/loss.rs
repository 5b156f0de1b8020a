use super::mix::MixedBatch;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::nn::{Gradients, MlpModel};

/// Values of the objective's components for one step.
/// `total = loss_pn + beta * loss_u + gamma * loss_pu`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LossBreakdown {
    pub loss_pn: f64,
    pub loss_u: f64,
    pub loss_pu: f64,
    pub total: f64,
}

/// Mean squared distance between the model's scores and the interpolated
/// targets. Realizes both the supervised (positive/negative) and the
/// unsupervised consistency terms, depending on the batch fed in.
pub fn consistency_loss(model: &MlpModel, batch: &MixedBatch) -> Result<f64> {
    let scores = model.forward(&batch.inputs)?;
    Ok(mse(&scores, &batch.targets))
}

fn mse(scores: &[f64], targets: &[f64]) -> f64 {
    let n = scores.len() as f64;
    scores
        .iter()
        .zip(targets)
        .map(|(s, t)| (t - s) * (t - s))
        .sum::<f64>()
        / n
}

/// Value + gradient of one consistency term, scaled by `weight` and
/// accumulated into `grads`.
fn consistency_term(
    model: &MlpModel,
    batch: &MixedBatch,
    weight: f64,
    grads: &mut Gradients,
) -> Result<f64> {
    let cache = model.forward_cache(&batch.inputs)?;
    let n = cache.scores.len() as f64;
    let loss = mse(&cache.scores, &batch.targets);
    if weight != 0.0 {
        let upstream: Vec<f64> = cache
            .scores
            .iter()
            .zip(&batch.targets)
            .map(|(s, t)| weight * 2.0 * (s - t) / n)
            .collect();
        model.backward(&cache, &upstream, grads)?;
    }
    Ok(loss)
}

/// Pairwise ranking hinge over all (positive, unlabeled) cross pairs:
/// `mean max(0, f(x_u) - f(x_p) + eta)`. Drives positive scores above
/// unlabeled scores by at least the margin.
pub fn margin_loss(model: &MlpModel, x_p: &Matrix, x_u: &Matrix, eta: f64) -> Result<f64> {
    let scores_p = model.forward(x_p)?;
    let scores_u = model.forward(x_u)?;
    Ok(margin_value(&scores_p, &scores_u, eta))
}

fn margin_value(scores_p: &[f64], scores_u: &[f64], eta: f64) -> f64 {
    let mut total = 0.0;
    for &sp in scores_p {
        for &su in scores_u {
            let z = su - sp + eta;
            if z > 0.0 {
                total += z;
            }
        }
    }
    total / (scores_p.len() * scores_u.len()) as f64
}

fn margin_term(
    model: &MlpModel,
    x_p: &Matrix,
    x_u: &Matrix,
    eta: f64,
    weight: f64,
    grads: &mut Gradients,
) -> Result<f64> {
    if x_p.rows() == 0 || x_u.rows() == 0 {
        return Err(Error::InvalidArgument(
            "margin loss needs nonempty positive and unlabeled batches".into(),
        ));
    }
    let cache_p = model.forward_cache(x_p)?;
    let cache_u = model.forward_cache(x_u)?;
    let scale = 1.0 / (x_p.rows() * x_u.rows()) as f64;
    let mut total = 0.0;
    let mut grad_p = vec![0.0; x_p.rows()];
    let mut grad_u = vec![0.0; x_u.rows()];
    for (i, &sp) in cache_p.scores.iter().enumerate() {
        for (j, &su) in cache_u.scores.iter().enumerate() {
            let z = su - sp + eta;
            if z > 0.0 {
                total += z;
                grad_p[i] -= scale;
                grad_u[j] += scale;
            }
        }
    }
    if weight != 0.0 {
        for g in grad_p.iter_mut().chain(grad_u.iter_mut()) {
            *g *= weight;
        }
        model.backward(&cache_p, &grad_p, grads)?;
        model.backward(&cache_u, &grad_u, grads)?;
    }
    Ok(total * scale)
}

/// Full objective for one step. `u_batch = None` means the unsupervised
/// term is warmed up (its coefficient is forced to 0 and its recorded value
/// is exactly 0). Returns the component values and the parameter gradients
/// of the weighted total.
pub fn total_loss(
    model: &MlpModel,
    pn_batch: &MixedBatch,
    u_batch: Option<&MixedBatch>,
    x_p: &Matrix,
    x_u: &Matrix,
    beta: f64,
    gamma: f64,
    eta: f64,
) -> Result<(LossBreakdown, Gradients)> {
    let mut grads = Gradients::zeros_like(model);
    let loss_pn = consistency_term(model, pn_batch, 1.0, &mut grads)?;
    let loss_u = match u_batch {
        Some(batch) if beta != 0.0 => consistency_term(model, batch, beta, &mut grads)?,
        _ => 0.0,
    };
    let loss_pu = if gamma != 0.0 {
        margin_term(model, x_p, x_u, eta, gamma, &mut grads)?
    } else {
        0.0
    };
    let total = loss_pn + beta * loss_u + gamma * loss_pu;
    if !total.is_finite() {
        return Err(Error::Divergence(format!(
            "non-finite loss: pn={loss_pn} u={loss_u} pu={loss_pu}"
        )));
    }
    Ok((
        LossBreakdown {
            loss_pn,
            loss_u,
            loss_pu,
            total,
        },
        grads,
    ))
}
