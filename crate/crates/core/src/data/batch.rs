use rand::seq::SliceRandom;
use rand::Rng as _;

use super::pu::PUDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;

/// Aligned mini-batches: positives, mined reliable negatives, unlabeled.
#[derive(Debug, Clone)]
pub struct TrainBatch {
    pub x_p: Matrix,
    pub x_n: Matrix,
    pub x_u: Matrix,
}

/// One epoch of batch sampling. Unlabeled rows are visited in a fresh
/// shuffled order (every row at least once per epoch); positive and
/// reliable-negative rows are drawn per step, with replacement whenever the
/// pool is smaller than the batch size.
#[derive(Debug)]
pub struct BatchPlan {
    u_order: Vec<usize>,
    batch: usize,
    cursor: usize,
}

impl BatchPlan {
    pub fn new(pu: &PUDataset, batch: usize, rng: &mut Rng) -> Result<Self> {
        if batch == 0 {
            return Err(Error::InvalidArgument("batch size must be positive".into()));
        }
        if pu.unlabeled_indices().is_empty() {
            return Err(Error::InvalidArgument("no unlabeled rows to train on".into()));
        }
        let mut u_order = pu.unlabeled_indices().to_vec();
        u_order.shuffle(rng);
        Ok(BatchPlan {
            u_order,
            batch,
            cursor: 0,
        })
    }

    /// Steps per epoch: `ceil(|U| / B)`.
    pub fn steps(&self) -> usize {
        self.u_order.len().div_ceil(self.batch)
    }

    pub fn next(&mut self, pu: &PUDataset, rn_indices: &[usize], rng: &mut Rng) -> Result<TrainBatch> {
        if rn_indices.is_empty() {
            return Err(Error::InvalidArgument("empty reliable-negative set".into()));
        }
        debug_assert!(rn_indices
            .iter()
            .all(|&i| pu.observed_labels()[i] == 0));
        let b = self.batch;
        // unlabeled: next chunk of the epoch order, wrapping into the same order
        let mut u_rows = Vec::with_capacity(b);
        for k in 0..b {
            u_rows.push(self.u_order[(self.cursor + k) % self.u_order.len()]);
        }
        self.cursor = (self.cursor + b).min(self.u_order.len()) % self.u_order.len().max(1);
        let p_rows = draw(pu.positive_indices(), b, rng);
        let n_rows = draw(rn_indices, b, rng);
        Ok(TrainBatch {
            x_p: pu.features.select_rows(&p_rows),
            x_n: pu.features.select_rows(&n_rows),
            x_u: pu.features.select_rows(&u_rows),
        })
    }
}

/// `b` rows from `pool`: without replacement when the pool is large enough,
/// with replacement otherwise.
fn draw(pool: &[usize], b: usize, rng: &mut Rng) -> Vec<usize> {
    if pool.len() >= b {
        rand::seq::index::sample(rng, pool.len(), b)
            .into_iter()
            .map(|i| pool[i])
            .collect()
    } else {
        (0..b).map(|_| pool[rng.random_range(0..pool.len())]).collect()
    }
}
