use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;

/// Fully labeled dataset: features plus true binary labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub features: Matrix,
    pub labels: Vec<u8>,
    pub name: String,
}

impl LabeledDataset {
    pub fn new(features: Matrix, labels: Vec<u8>, name: impl Into<String>) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::shape(
                format!("{} labels", features.rows()),
                format!("{} labels", labels.len()),
                "LabeledDataset::new",
            ));
        }
        if let Some(v) = features.data().iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite feature value {v}")));
        }
        if let Some(l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidArgument(format!("label {l} outside {{0,1}}")));
        }
        Ok(LabeledDataset {
            features,
            labels,
            name: name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn positive_count(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            name: self.name.clone(),
        }
    }

    /// Seeded shuffle-then-cut split. `train_fraction` in (0,1).
    pub fn train_test_split(&self, train_fraction: f64, rng: &mut Rng) -> Result<(LabeledDataset, LabeledDataset)> {
        if !(0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "train_fraction {train_fraction} outside (0,1)"
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(rng);
        let cut = (self.len() as f64 * train_fraction).floor() as usize;
        Ok((self.subset(&order[..cut]), self.subset(&order[cut..])))
    }
}

/// Per-column zero-mean unit-variance scaling, fit on the training split.
/// Constant columns map to zero.
#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>, // 1/std, or 0 for constant columns
}

impl Standardizer {
    pub fn fit(train: &LabeledDataset) -> Standardizer {
        let (n, d) = (train.len(), train.dim());
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(train.features.row(i)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut var = vec![0.0; d];
        for i in 0..n {
            for j in 0..d {
                let c = train.features.get(i, j) - mean[j];
                var[j] += c * c;
            }
        }
        let scale = var
            .iter()
            .map(|&v| {
                let v = v / n as f64;
                if v < 1e-24 {
                    0.0
                } else {
                    1.0 / v.sqrt()
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, dataset: &LabeledDataset) -> LabeledDataset {
        let mut features = dataset.features.clone();
        for i in 0..features.rows() {
            let row = features.row_mut(i);
            for j in 0..row.len() {
                row[j] = (row[j] - self.mean[j]) * self.scale[j];
            }
        }
        LabeledDataset {
            features,
            labels: dataset.labels.clone(),
            name: dataset.name.clone(),
        }
    }
}
