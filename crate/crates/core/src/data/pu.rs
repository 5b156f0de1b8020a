use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{self, Stream};

/// A simulated PU problem: features with observed labels `s`, hidden true
/// labels `y`, and the class-prior / class-frequency of the construction.
///
/// Training code must only look at `observed` (via the index accessors);
/// `hidden_labels` and `class_prior` exist for evaluation and for the
/// baselines that require the prior.
#[derive(Debug, Clone)]
pub struct PUDataset {
    pub features: Matrix,
    observed: Vec<u8>,
    hidden: Vec<u8>,
    class_prior: f64,
    class_frequency: f64,
    positive_indices: Vec<usize>,
    unlabeled_indices: Vec<usize>,
}

impl PUDataset {
    fn build(features: Matrix, observed: Vec<u8>, hidden: Vec<u8>) -> Result<Self> {
        if observed.len() != features.rows() || hidden.len() != features.rows() {
            return Err(Error::shape(
                format!("{} rows", features.rows()),
                format!("{}/{} labels", observed.len(), hidden.len()),
                "PUDataset::build",
            ));
        }
        for (i, (&s, &y)) in observed.iter().zip(&hidden).enumerate() {
            if s == 1 && y != 1 {
                return Err(Error::InvalidArgument(format!(
                    "row {i}: observed-positive with true label 0"
                )));
            }
        }
        let positive_indices: Vec<usize> = (0..observed.len()).filter(|&i| observed[i] == 1).collect();
        let unlabeled_indices: Vec<usize> = (0..observed.len()).filter(|&i| observed[i] == 0).collect();
        if positive_indices.is_empty() {
            return Err(Error::InvalidArgument(
                "PU dataset needs at least one labeled positive".into(),
            ));
        }
        let hidden_pos_in_u = unlabeled_indices.iter().filter(|&&i| hidden[i] == 1).count();
        let class_prior = if unlabeled_indices.is_empty() {
            0.0
        } else {
            hidden_pos_in_u as f64 / unlabeled_indices.len() as f64
        };
        let p = positive_indices.len() as f64;
        let class_frequency = p / (p + class_prior * unlabeled_indices.len() as f64);
        Ok(PUDataset {
            features,
            observed,
            hidden,
            class_prior,
            class_frequency,
            positive_indices,
            unlabeled_indices,
        })
    }

    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn observed_labels(&self) -> &[u8] {
        &self.observed
    }

    /// True labels. Evaluation and simulation only; the MixPUL training path
    /// never reads these.
    pub fn hidden_labels(&self) -> &[u8] {
        &self.hidden
    }

    /// Class-prior of the unlabeled pool, computed from the hidden labels at
    /// construction. Exposed only for uPU/nnPU and for evaluation.
    pub fn class_prior(&self) -> f64 {
        self.class_prior
    }

    pub fn class_frequency(&self) -> f64 {
        self.class_frequency
    }

    pub fn positive_indices(&self) -> &[usize] {
        &self.positive_indices
    }

    pub fn unlabeled_indices(&self) -> &[usize] {
        &self.unlabeled_indices
    }
}

/// Sidecar record sufficient to rebuild a PU split bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PuSplitManifest {
    pub dataset: String,
    pub seed: u64,
    pub requested_class_frequency: Option<f64>,
    pub labeled_count: usize,
    pub retained_positive_indices: Vec<usize>,
}

fn retain_positives(
    dataset: &LabeledDataset,
    keep: usize,
    seed: u64,
    requested_c: Option<f64>,
) -> Result<(PUDataset, PuSplitManifest)> {
    let true_positives: Vec<usize> = (0..dataset.len()).filter(|&i| dataset.labels[i] == 1).collect();
    if keep == 0 {
        return Err(Error::InvalidArgument(
            "PU construction must keep at least one labeled positive".into(),
        ));
    }
    if keep > true_positives.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot label {keep} positives, only {} exist",
            true_positives.len()
        )));
    }
    let mut pool = true_positives;
    let mut rng = rng::stream(seed, Stream::PuConstruction);
    pool.shuffle(&mut rng);
    let mut retained: Vec<usize> = pool[..keep].to_vec();
    retained.sort_unstable();
    let manifest = PuSplitManifest {
        dataset: dataset.name.clone(),
        seed,
        requested_class_frequency: requested_c,
        labeled_count: keep,
        retained_positive_indices: retained,
    };
    let pu = pu_from_manifest(dataset, &manifest)?;
    Ok((pu, manifest))
}

/// Rebuild a PU split from its manifest. Deterministic: the manifest stores
/// the retained indices themselves.
pub fn pu_from_manifest(dataset: &LabeledDataset, manifest: &PuSplitManifest) -> Result<PUDataset> {
    let mut observed = vec![0u8; dataset.len()];
    for &i in &manifest.retained_positive_indices {
        if i >= dataset.len() {
            return Err(Error::InvalidArgument(format!(
                "manifest index {i} out of range for {} rows",
                dataset.len()
            )));
        }
        if dataset.labels[i] != 1 {
            return Err(Error::InvalidArgument(format!(
                "manifest retains row {i}, which is not a true positive"
            )));
        }
        observed[i] = 1;
    }
    PUDataset::build(dataset.features.clone(), observed, dataset.labels.clone())
}

/// Construct a PU problem targeting class-frequency `c`:
/// a seeded random subset of `round(c * |positives|)` true positives keeps
/// its label; every other row becomes unlabeled.
pub fn make_pu(dataset: &LabeledDataset, c: f64, seed: u64) -> Result<(PUDataset, PuSplitManifest)> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "class frequency {c} outside (0, 1]"
        )));
    }
    let total_pos = dataset.positive_count();
    let keep = ((c * total_pos as f64).round() as usize).max(1);
    if keep > total_pos {
        return Err(Error::InvalidArgument(format!(
            "class frequency {c} infeasible: needs {keep} labeled positives, {total_pos} exist"
        )));
    }
    retain_positives(dataset, keep, seed, Some(c))
}

/// Construct a PU problem with an exact number of labeled positives.
pub fn make_pu_by_count(
    dataset: &LabeledDataset,
    labeled: usize,
    seed: u64,
) -> Result<(PUDataset, PuSplitManifest)> {
    retain_positives(dataset, labeled, seed, None)
}
