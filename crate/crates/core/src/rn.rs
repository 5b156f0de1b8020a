//! Reliable-negative mining: pick a subset of the unlabeled pool to stand in
//! for the missing negative class. Three strategies: uniform sampling,
//! farthest mean distance from the positives, and lowest score under a
//! positive-vs-unlabeled discriminator. All tie-breaking is by ascending row
//! index so runs replay exactly.

use serde::{Deserialize, Serialize};

use crate::data::PUDataset;
use crate::error::{Error, Result};
use crate::linalg::euclidean;
use crate::nn::sigmoid;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RnMethod {
    Rand,
    Dist,
    Ntc,
}

impl std::str::FromStr for RnMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rand" => Ok(RnMethod::Rand),
            "dist" => Ok(RnMethod::Dist),
            "ntc" => Ok(RnMethod::Ntc),
            other => Err(Error::InvalidArgument(format!("unknown RN method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RnConfig {
    pub method: RnMethod,
    pub count: usize,
}

pub fn mine(pu: &PUDataset, config: RnConfig, rng: &mut Rng) -> Result<Vec<usize>> {
    match config.method {
        RnMethod::Rand => mine_rand(pu, config.count, rng),
        RnMethod::Dist => mine_dist(pu, config.count),
        RnMethod::Ntc => mine_ntc(pu, config.count, rng),
    }
}

fn check_count(pu: &PUDataset, count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "reliable-negative count must be at least 1".into(),
        ));
    }
    if count > pu.unlabeled_indices().len() {
        return Err(Error::InvalidArgument(format!(
            "reliable-negative count {count} exceeds unlabeled pool of {}",
            pu.unlabeled_indices().len()
        )));
    }
    Ok(())
}

/// Uniform sample without replacement from the unlabeled pool.
pub fn mine_rand(pu: &PUDataset, count: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    check_count(pu, count)?;
    let pool = pu.unlabeled_indices();
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, pool.len(), count)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// The `count` unlabeled rows with the largest mean Euclidean distance to
/// the labeled positives.
pub fn mine_dist(pu: &PUDataset, count: usize) -> Result<Vec<usize>> {
    check_count(pu, count)?;
    let positives = pu.positive_indices();
    let mut scored: Vec<(usize, f64)> = pu
        .unlabeled_indices()
        .iter()
        .map(|&u| {
            let mean_dist = positives
                .iter()
                .map(|&p| euclidean(pu.features.row(u), pu.features.row(p)))
                .sum::<f64>()
                / positives.len() as f64;
            (u, mean_dist)
        })
        .collect();
    // farthest first; ties broken by lower row index
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut picked: Vec<usize> = scored[..count].iter().map(|&(u, _)| u).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// The `count` unlabeled rows scored lowest by a positive-vs-unlabeled
/// discriminator. The default discriminator is [`ntc_scores`]; any scorer
/// over the unlabeled rows can be substituted via [`mine_ntc_with`].
pub fn mine_ntc(pu: &PUDataset, count: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    check_count(pu, count)?;
    match ntc_scores(pu) {
        Ok(scores) => mine_ntc_with(pu, count, &scores),
        Err(Error::Divergence(msg)) => {
            log::warn!("NTC discriminator diverged ({msg}); falling back to Rand");
            mine_rand(pu, count, rng)
        }
        Err(e) => Err(e),
    }
}

/// Select the `count` lowest-scoring unlabeled rows, ties by lower row index.
pub fn mine_ntc_with(pu: &PUDataset, count: usize, scores: &[f64]) -> Result<Vec<usize>> {
    check_count(pu, count)?;
    if scores.len() != pu.unlabeled_indices().len() {
        return Err(Error::shape(
            format!("{} scores", pu.unlabeled_indices().len()),
            format!("{} scores", scores.len()),
            "mine_ntc_with",
        ));
    }
    let mut scored: Vec<(usize, f64)> = pu
        .unlabeled_indices()
        .iter()
        .copied()
        .zip(scores.iter().copied())
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut picked: Vec<usize> = scored[..count].iter().map(|&(u, _)| u).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Logistic-regression discriminator trained on positives-vs-unlabeled by
/// full-batch gradient descent, positives reweighted to balance the classes.
/// Returns one score per unlabeled row, in pool order.
pub fn ntc_scores(pu: &PUDataset) -> Result<Vec<f64>> {
    let d = pu.dim();
    let positives = pu.positive_indices();
    let unlabeled = pu.unlabeled_indices();
    let pos_weight = unlabeled.len() as f64 / positives.len() as f64;
    let n = positives.len() + unlabeled.len();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let lr = 0.5;
    for _ in 0..200 {
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        let mut accumulate = |row: &[f64], target: f64, weight: f64| {
            let z = row.iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>() + b;
            let err = weight * (sigmoid(z) - target);
            for (g, x) in gw.iter_mut().zip(row) {
                *g += err * x;
            }
            gb += err;
        };
        for &p in positives {
            accumulate(pu.features.row(p), 1.0, pos_weight);
        }
        for &u in unlabeled {
            accumulate(pu.features.row(u), 0.0, 1.0);
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= lr * g / n as f64;
        }
        b -= lr * gb / n as f64;
        if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence("NTC weights became non-finite".into()));
        }
    }
    Ok(unlabeled
        .iter()
        .map(|&u| {
            let z = pu.features.row(u).iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>() + b;
            sigmoid(z)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_pu_by_count, LabeledDataset};
    use crate::linalg::Matrix;
    use crate::rng;
    use rand::Rng as _;

    fn line_dataset(pos_at: &[f64], unl_at: &[f64]) -> PUDataset {
        // positives first, then unlabeled (true labels for unlabeled: 0)
        let mut values: Vec<f64> = pos_at.to_vec();
        values.extend_from_slice(unl_at);
        let labels: Vec<u8> = (0..values.len()).map(|i| u8::from(i < pos_at.len())).collect();
        let ds = LabeledDataset::new(
            Matrix::from_vec(values.len(), 1, values).unwrap(),
            labels,
            "line",
        )
        .unwrap();
        make_pu_by_count(&ds, pos_at.len(), 0).unwrap().0
    }

    #[test]
    fn dist_orders_by_distance() {
        let pu = line_dataset(&[0.0], &[1.0, 5.0, 10.0]);
        let n = mine_dist(&pu, 2).unwrap();
        // unlabeled rows are indices 1..=3; picks x=10 (row 3) and x=5 (row 2)
        assert_eq!(n, vec![2, 3]);
    }

    #[test]
    fn dist_ties_prefer_lower_index() {
        let pu = line_dataset(&[0.0], &[3.0, 3.0, 3.0]);
        let n = mine_dist(&pu, 2).unwrap();
        assert_eq!(n, vec![1, 2]);
    }

    #[test]
    fn dist_matches_brute_force_oracle() {
        let mut r = rng::from_seed(31);
        // random 2-D instance
        let n_rows = 60;
        let data: Vec<f64> = (0..2 * n_rows).map(|_| r.random_range(-3.0..3.0)).collect();
        let labels: Vec<u8> = (0..n_rows).map(|i| u8::from(i % 5 == 0)).collect();
        let ds = LabeledDataset::new(Matrix::from_vec(n_rows, 2, data).unwrap(), labels, "r").unwrap();
        let pu = make_pu_by_count(&ds, ds.positive_count(), 0).unwrap().0;
        let got = mine_dist(&pu, 3).unwrap();
        // oracle: sort all mean distances exhaustively
        let mut all: Vec<(usize, f64)> = pu
            .unlabeled_indices()
            .iter()
            .map(|&u| {
                let m = pu
                    .positive_indices()
                    .iter()
                    .map(|&p| euclidean(pu.features.row(u), pu.features.row(p)))
                    .sum::<f64>()
                    / pu.positive_indices().len() as f64;
                (u, m)
            })
            .collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut expected: Vec<usize> = all[..3].iter().map(|&(u, _)| u).collect();
        expected.sort_unstable();
        assert_eq!(got, expected);
    }

    #[test]
    fn rand_boundary_and_errors() {
        let pu = line_dataset(&[0.0], &[1.0, 2.0, 3.0]);
        let mut r = rng::from_seed(0);
        let all = mine_rand(&pu, 3, &mut r).unwrap();
        assert_eq!(all, pu.unlabeled_indices());
        assert!(mine_rand(&pu, 0, &mut r).is_err());
        assert!(mine_rand(&pu, 4, &mut r).is_err());
    }

    #[test]
    fn rand_seeds_differ_but_stay_in_pool() {
        let unl: Vec<f64> = (0..100).map(f64::from).collect();
        let pu = line_dataset(&[0.0], &unl);
        let a = mine_rand(&pu, 10, &mut rng::from_seed(1)).unwrap();
        let b = mine_rand(&pu, 10, &mut rng::from_seed(2)).unwrap();
        assert_ne!(a, b);
        for set in [&a, &b] {
            for &i in set.iter() {
                assert!(pu.unlabeled_indices().contains(&i));
            }
        }
    }

    #[test]
    fn ntc_finds_far_negative_cluster() {
        // positives near +2, a separable unlabeled cluster near -2
        let pu = line_dataset(&[2.0, 2.2, 1.8, 2.1], &[-2.0, -2.1, -1.9, 1.9, 2.05]);
        let n = mine_ntc(&pu, 3, &mut rng::from_seed(0)).unwrap();
        assert_eq!(n, vec![4, 5, 6]); // the cluster at -2
        // oracle: brute-force sort of the discriminator scores
        let scores = ntc_scores(&pu).unwrap();
        let expected = mine_ntc_with(&pu, 3, &scores).unwrap();
        assert_eq!(n, expected);
    }

    #[test]
    fn ntc_constant_scores_take_lowest_indices() {
        let pu = line_dataset(&[0.0], &[1.0, 2.0, 3.0, 4.0]);
        let n = mine_ntc_with(&pu, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(n, vec![1, 2]);
    }

    #[test]
    fn mined_sets_disjoint_from_positives_and_exact_size() {
        let unl: Vec<f64> = (0..50).map(|i| f64::from(i) * 0.1).collect();
        let pu = line_dataset(&[5.0, 6.0], &unl);
        let mut r = rng::from_seed(12);
        for method in [RnMethod::Rand, RnMethod::Dist, RnMethod::Ntc] {
            let n = mine(&pu, RnConfig { method, count: 7 }, &mut r).unwrap();
            assert_eq!(n.len(), 7);
            for &i in &n {
                assert_eq!(pu.observed_labels()[i], 0);
            }
        }
    }

    #[test]
    fn purity_beats_base_rate_on_separated_gaussians() {
        // sanity, not a theorem: on well-separated data Dist and NTC mined
        // sets should contain at least the base-rate fraction of true
        // negatives, averaged over seeds
        let mut purity_dist = 0.0;
        let mut purity_ntc = 0.0;
        let mut base_rate = 0.0;
        let seeds = 20;
        for seed in 0..seeds {
            let mut r = rng::from_seed(seed);
            let n_per = 40;
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            for _ in 0..n_per {
                rows.push(vec![3.0 + r.random_range(-0.5..0.5), 3.0 + r.random_range(-0.5..0.5)]);
                labels.push(1);
            }
            for _ in 0..n_per {
                rows.push(vec![-3.0 + r.random_range(-0.5..0.5), -3.0 + r.random_range(-0.5..0.5)]);
                labels.push(0);
            }
            let ds = LabeledDataset::new(Matrix::from_rows(&rows).unwrap(), labels, "g").unwrap();
            let (pu, _) = make_pu_by_count(&ds, 10, seed).unwrap();
            let count = 20;
            let frac_true_neg = |set: &[usize]| {
                set.iter().filter(|&&i| pu.hidden_labels()[i] == 0).count() as f64 / set.len() as f64
            };
            purity_dist += frac_true_neg(&mine_dist(&pu, count).unwrap());
            purity_ntc += frac_true_neg(&mine_ntc(&pu, count, &mut r).unwrap());
            base_rate += 1.0 - pu.class_prior();
        }
        purity_dist /= seeds as f64;
        purity_ntc /= seeds as f64;
        base_rate /= seeds as f64;
        assert!(purity_dist >= base_rate, "dist {purity_dist} < base {base_rate}");
        assert!(purity_ntc >= base_rate, "ntc {purity_ntc} < base {base_rate}");
    }
}
