use rand::seq::SliceRandom;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;

/// Interpolated batch: `inputs[i] = lambda * x_i + (1 - lambda) * x_{r_i}`
/// with targets interpolated the same way.
#[derive(Debug, Clone)]
pub struct MixedBatch {
    pub inputs: Matrix,
    pub targets: Vec<f64>,
    pub lambda: f64,
    pub permutation: Vec<usize>,
}

/// Convex combination of two equal-length vectors.
pub fn mix(x_a: &[f64], x_b: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if x_a.len() != x_b.len() {
        return Err(Error::shape(
            format!("{} elements", x_a.len()),
            format!("{} elements", x_b.len()),
            "mix",
        ));
    }
    Ok(x_a
        .iter()
        .zip(x_b)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect())
}

/// One mixup coefficient per mini-batch, `lambda ~ Beta(alpha, alpha)`.
pub fn sample_lambda(alpha: f64, rng: &mut Rng) -> Result<f64> {
    let beta = Beta::new(alpha, alpha)
        .map_err(|e| Error::InvalidArgument(format!("bad Beta shape {alpha}: {e}")))?;
    Ok(beta.sample(rng))
}

pub fn random_permutation(len: usize, rng: &mut Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(rng);
    perm
}

fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    if perm.len() != len {
        return Err(Error::shape(
            format!("{len} entries"),
            format!("{} entries", perm.len()),
            "mixup permutation",
        ));
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || seen[p] {
            return Err(Error::InvalidArgument(
                "mixup pairing is not a permutation".into(),
            ));
        }
        seen[p] = true;
    }
    Ok(())
}

fn mix_rows(x: &Matrix, pair: &Matrix, perm: &[usize], lambda: f64) -> Matrix {
    let mut inputs = Matrix::zeros(x.rows(), x.cols());
    for i in 0..x.rows() {
        let a = x.row(i);
        let b = pair.row(perm[i]);
        let out = inputs.row_mut(i);
        for j in 0..out.len() {
            out[j] = lambda * a[j] + (1.0 - lambda) * b[j];
        }
    }
    inputs
}

/// Mix unlabeled rows with a permuted copy of themselves; targets are the
/// interpolated teacher soft labels.
pub fn build_mixed_unlabeled(
    x_u: &Matrix,
    soft_labels: &[f64],
    lambda: f64,
    permutation: &[usize],
) -> Result<MixedBatch> {
    if soft_labels.len() != x_u.rows() {
        return Err(Error::shape(
            format!("{} soft labels", x_u.rows()),
            format!("{} soft labels", soft_labels.len()),
            "build_mixed_unlabeled",
        ));
    }
    check_permutation(permutation, x_u.rows())?;
    let inputs = mix_rows(x_u, x_u, permutation, lambda);
    let targets = (0..x_u.rows())
        .map(|i| lambda * soft_labels[i] + (1.0 - lambda) * soft_labels[permutation[i]])
        .collect();
    Ok(MixedBatch {
        inputs,
        targets,
        lambda,
        permutation: permutation.to_vec(),
    })
}

/// Mix positives (hard target 1) with permuted reliable negatives (hard
/// target 0); every interpolated target is exactly `lambda`.
pub fn build_mixed_pn(
    x_p: &Matrix,
    x_n: &Matrix,
    lambda: f64,
    permutation: &[usize],
) -> Result<MixedBatch> {
    if x_p.rows() != x_n.rows() || x_p.cols() != x_n.cols() {
        return Err(Error::shape(
            format!("{}x{}", x_p.rows(), x_p.cols()),
            format!("{}x{}", x_n.rows(), x_n.cols()),
            "build_mixed_pn",
        ));
    }
    check_permutation(permutation, x_p.rows())?;
    let inputs = mix_rows(x_p, x_n, permutation, lambda);
    let targets = vec![lambda; x_p.rows()];
    Ok(MixedBatch {
        inputs,
        targets,
        lambda,
        permutation: permutation.to_vec(),
    })
}
