//! Metrics: AUC (rank-based, midrank ties), misclassification rate, and the
//! PU-AUC / PN-AUC linear-identity check.

use crate::error::{Error, Result};

/// Area under the ROC curve: the fraction of (positive, negative) pairs
/// ranked correctly, ties counted 0.5. Computed from midranks in
/// O(n log n); equivalent to exhaustive pair counting.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::shape(
            format!("{} labels", scores.len()),
            format!("{} labels", labels.len()),
            "auc",
        ));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidArgument(
            "auc needs at least one positive and one negative".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // midranks over tie groups, 1-indexed
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if labels[idx] == 1 {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Fraction of thresholded predictions disagreeing with the labels.
/// A score exactly at the threshold counts as a positive prediction.
pub fn error_rate(scores: &[f64], labels: &[u8], threshold: f64) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::shape(
            format!("{} labels", scores.len()),
            format!("{} labels", labels.len()),
            "error_rate",
        ));
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("error_rate on empty input".into()));
    }
    let wrong = scores
        .iter()
        .zip(labels)
        .filter(|(&s, &l)| u8::from(s >= threshold) != l)
        .count();
    Ok(wrong as f64 / scores.len() as f64)
}

/// Result of the PU-AUC identity check: the empirical PU ranking risk, the
/// PN ranking risk over the true negatives, and the identity residual
/// `R_PU - ((1 - pi) R_PN + pi / 2)`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub r_pu: f64,
    pub r_pn: f64,
    pub residual: f64,
}

/// Zero-one ranking risk between two score sets: mean over cross pairs of
/// `l01(a - b)` with ties at 0.5. Equals `1 - AUC(a over b)`.
fn pair_risk(a: &[f64], b: &[f64]) -> f64 {
    // rank-based: risk = 1 - auc where a plays "positive"
    let mut scores = Vec::with_capacity(a.len() + b.len());
    let mut labels = Vec::with_capacity(a.len() + b.len());
    scores.extend_from_slice(a);
    labels.extend(std::iter::repeat_n(1u8, a.len()));
    scores.extend_from_slice(b);
    labels.extend(std::iter::repeat_n(0u8, b.len()));
    1.0 - auc(&scores, &labels).expect("both sides nonempty")
}

/// Check that the PU ranking risk is the affine image of the PN ranking
/// risk under the unlabeled-mixture construction.
///
/// `unl_true_labels` are the hidden labels of the unlabeled pool (used only
/// to form the true-negative side); `class_prior` is the positive fraction
/// of the unlabeled mixture. When the pool has no true negatives the PN
/// risk carries weight zero and is reported as 0.
pub fn pu_auc_identity_check(
    pos_scores: &[f64],
    unl_scores: &[f64],
    unl_true_labels: &[u8],
    class_prior: f64,
) -> Result<IdentityCheck> {
    if pos_scores.is_empty() || unl_scores.is_empty() {
        return Err(Error::InvalidArgument(
            "identity check needs nonempty positive and unlabeled sets".into(),
        ));
    }
    if unl_scores.len() != unl_true_labels.len() {
        return Err(Error::shape(
            format!("{} labels", unl_scores.len()),
            format!("{} labels", unl_true_labels.len()),
            "pu_auc_identity_check",
        ));
    }
    let r_pu = pair_risk(pos_scores, unl_scores);
    let neg_scores: Vec<f64> = unl_scores
        .iter()
        .zip(unl_true_labels)
        .filter(|(_, &y)| y == 0)
        .map(|(&s, _)| s)
        .collect();
    let r_pn = if neg_scores.is_empty() {
        0.0
    } else {
        pair_risk(pos_scores, &neg_scores)
    };
    let residual = r_pu - ((1.0 - class_prior) * r_pn + class_prior / 2.0);
    Ok(IdentityCheck { r_pu, r_pn, residual })
}
