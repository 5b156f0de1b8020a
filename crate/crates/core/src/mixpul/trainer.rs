use super::loss::total_loss;
use super::mix::{build_mixed_pn, build_mixed_unlabeled, random_permutation, sample_lambda};
use crate::config::TrainConfig;
use crate::data::{BatchPlan, LabeledDataset, PUDataset};
use crate::error::{Error, Result};
use crate::eval::{auc, error_rate};
use crate::nn::{EmaModel, MlpModel, OptimizerState};
use crate::report::{EpochRecord, RunReport};
use crate::rn::{mine, RnConfig};
use crate::rng::{self, Stream};

/// A finished run: the student, its EMA teacher (the model used for
/// evaluation), the mined reliable-negative indices, and the per-epoch
/// trajectory.
#[derive(Debug, Clone)]
pub struct TrainedMixpul {
    pub model: MlpModel,
    pub teacher: EmaModel,
    pub rn_indices: Vec<usize>,
    pub report: RunReport,
}

/// Default reliable-negative pool when the config leaves it unset: at least
/// one batch worth and at least as many as there are labeled positives,
/// capped by the unlabeled pool.
pub fn default_rn_count(pu: &PUDataset, batch_size: usize) -> usize {
    pu.positive_indices()
        .len()
        .max(batch_size)
        .min(pu.unlabeled_indices().len())
}

pub fn train(pu: &PUDataset, test: &LabeledDataset, config: &TrainConfig) -> Result<TrainedMixpul> {
    config.validate()?;
    if test.dim() != pu.dim() {
        return Err(Error::shape(
            format!("{} features", pu.dim()),
            format!("{} features", test.dim()),
            "mixpul::train test set",
        ));
    }
    let seed = config.seed;
    let mut init_rng = rng::stream(seed, Stream::Init);
    let mut rn_rng = rng::stream(seed, Stream::RnMining);
    let mut batch_rng = rng::stream(seed, Stream::Batches);
    let mut mix_rng = rng::stream(seed, Stream::Mixup);

    let rn_config = RnConfig {
        method: config.rn_method,
        count: config
            .rn_count
            .unwrap_or_else(|| default_rn_count(pu, config.batch_size)),
    };
    let mut rn_indices = mine(pu, rn_config, &mut rn_rng)?;

    let mut model = MlpModel::new(&config.dims(pu.dim()), &mut init_rng)?;
    let mut teacher = EmaModel::new(&model, config.ema_decay)?;
    let mut optimizer = OptimizerState::new(config.sgd(), &model)?;
    let mut report = RunReport::default();

    'epochs: for epoch in 0..config.epochs {
        if config.remine_per_epoch && epoch > 0 {
            rn_indices = mine(pu, rn_config, &mut rn_rng)?;
        }
        let warmup = epoch < config.warmup_epochs;
        let mut plan = BatchPlan::new(pu, config.batch_size, &mut batch_rng)?;
        let steps = plan.steps();
        let mut sums = (0.0, 0.0, 0.0);
        for _ in 0..steps {
            let batch = plan.next(pu, &rn_indices, &mut batch_rng)?;
            let lambda = sample_lambda(config.alpha, &mut mix_rng)?;
            let lambda_pn = if config.independent_lambda {
                sample_lambda(config.alpha, &mut mix_rng)?
            } else {
                lambda
            };
            let u_batch = if !warmup && config.beta != 0.0 {
                let soft_labels = teacher.forward(&batch.x_u)?;
                let perm = random_permutation(batch.x_u.rows(), &mut mix_rng);
                Some(build_mixed_unlabeled(&batch.x_u, &soft_labels, lambda, &perm)?)
            } else {
                None
            };
            let perm_pn = random_permutation(batch.x_p.rows(), &mut mix_rng);
            let pn_batch = build_mixed_pn(&batch.x_p, &batch.x_n, lambda_pn, &perm_pn)?;
            let step = total_loss(
                &model,
                &pn_batch,
                u_batch.as_ref(),
                &batch.x_p,
                &batch.x_u,
                config.beta,
                config.gamma,
                config.eta,
            )
            .and_then(|(breakdown, grads)| {
                optimizer.step(&mut model, &grads)?;
                Ok(breakdown)
            });
            let breakdown = match step {
                Ok(b) => b,
                Err(Error::Divergence(msg)) => {
                    report.diverged = Some(format!("epoch {epoch}: {msg}"));
                    break 'epochs;
                }
                Err(e) => return Err(e),
            };
            teacher.update(&model)?;
            sums.0 += breakdown.loss_pn;
            sums.1 += breakdown.loss_u;
            sums.2 += breakdown.loss_pu;
        }
        report.epochs.push(evaluate_epoch(
            epoch,
            (sums.0 / steps as f64, sums.1 / steps as f64, sums.2 / steps as f64),
            &teacher,
            pu,
            test,
        )?);
    }

    Ok(TrainedMixpul {
        model,
        teacher,
        rn_indices,
        report,
    })
}

fn evaluate_epoch(
    epoch: usize,
    (loss_pn, loss_u, loss_pu): (f64, f64, f64),
    teacher: &EmaModel,
    pu: &PUDataset,
    test: &LabeledDataset,
) -> Result<EpochRecord> {
    let train_scores = teacher.forward(&pu.features)?;
    let test_scores = teacher.forward(&test.features)?;
    Ok(EpochRecord {
        epoch,
        loss_pn,
        loss_u,
        loss_pu,
        train_error: error_rate(&train_scores, pu.hidden_labels(), 0.5)?,
        test_error: error_rate(&test_scores, &test.labels, 0.5)?,
        test_auc: auc(&test_scores, &test.labels)?,
    })
}
