//! Run configuration: a flat key-value file (TOML syntax, no tables).
//!
//! Recognized keys and defaults:
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `alpha` | 1.0 | Beta shape for the mixup coefficient |
//! | `beta` | 1.0 | weight of the unsupervised consistency term |
//! | `gamma` | 1.0 | weight of the positive/unlabeled margin term |
//! | `eta` | 0.1 | ranking margin, in [0,1] |
//! | `warmup_epochs` | 20 | epochs before the unsupervised term switches on |
//! | `lr` | 1e-3 | learning rate |
//! | `momentum` | 0.9 | Nesterov momentum |
//! | `weight_decay` | 1e-4 | L2 coefficient |
//! | `ema_decay` | 0.999 | teacher parameter decay |
//! | `batch_size` | 128 | rows per pool per step |
//! | `epochs` | 200 | training epochs |
//! | `hidden` | [100, 100] | hidden layer widths |
//! | `rn_method` | "rand" | one of rand, dist, ntc |
//! | `rn_count` | max(\|P\|, batch) | reliable negatives to mine |
//! | `remine_per_epoch` | false | re-mine negatives every epoch |
//! | `independent_lambda` | false | separate mixup draw for the PN batch |
//! | `seed` | 0 | run seed |
//! | `class_frequency` | — | PU construction: fraction of positives labeled |
//! | `positive_count` | — | PU construction: exact labeled-positive count |
//! | `pi` | true prior | class prior handed to uPU/nnPU |
//! | `pi_multiplier` | 1.0 | misspecification factor applied to `pi` |

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::SgdConfig;
use crate::rn::RnMethod;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub warmup_epochs: usize,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub ema_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub hidden: Vec<usize>,
    pub rn_method: RnMethod,
    pub rn_count: Option<usize>,
    pub remine_per_epoch: bool,
    pub independent_lambda: bool,
    pub seed: u64,
    pub class_frequency: Option<f64>,
    pub positive_count: Option<usize>,
    pub pi: Option<f64>,
    pub pi_multiplier: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            eta: 0.1,
            warmup_epochs: 20,
            lr: 1e-3,
            momentum: 0.9,
            weight_decay: 1e-4,
            ema_decay: 0.999,
            batch_size: 128,
            epochs: 200,
            hidden: vec![100, 100],
            rn_method: RnMethod::Rand,
            rn_count: None,
            remine_per_epoch: false,
            independent_lambda: false,
            seed: 0,
            class_frequency: None,
            positive_count: None,
            pi: None,
            pi_multiplier: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: TrainConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha <= 0.0 {
            return Err(Error::Config("alpha must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Config("eta must be in [0,1]".into()));
        }
        if self.beta < 0.0 || self.gamma < 0.0 {
            return Err(Error::Config("beta and gamma must be nonnegative".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.ema_decay) {
            return Err(Error::Config("ema_decay must be in [0,1)".into()));
        }
        if let Some(c) = self.class_frequency {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::Config("class_frequency must be in (0,1]".into()));
            }
        }
        if let Some(pi) = self.pi {
            if !(pi > 0.0 && pi < 1.0) {
                return Err(Error::Config("pi must be strictly inside (0,1)".into()));
            }
        }
        Ok(())
    }

    pub fn sgd(&self) -> SgdConfig {
        SgdConfig {
            lr: self.lr,
            momentum: self.momentum,
            weight_decay: self.weight_decay,
        }
    }

    /// Full dimension chain for a given input width.
    pub fn dims(&self, input_dim: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(&self.hidden);
        dims.push(1);
        dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty() {
        let c = TrainConfig::from_toml_str("").unwrap();
        assert_eq!(c, TrainConfig::default());
        assert_eq!(c.epochs, 200);
        assert_eq!(c.batch_size, 128);
        assert_eq!(c.ema_decay, 0.999);
    }

    #[test]
    fn flat_keys_parse() {
        let c = TrainConfig::from_toml_str(
            "alpha = 0.5\nrn_method = \"ntc\"\nepochs = 10\nclass_frequency = 0.2\n",
        )
        .unwrap();
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.rn_method, RnMethod::Ntc);
        assert_eq!(c.epochs, 10);
        assert_eq!(c.class_frequency, Some(0.2));
    }

    #[test]
    fn unknown_key_and_bad_values_rejected() {
        assert!(TrainConfig::from_toml_str("not_a_key = 1\n").is_err());
        assert!(TrainConfig::from_toml_str("alpha = 0.0\n").is_err());
        assert!(TrainConfig::from_toml_str("eta = 1.5\n").is_err());
        assert!(TrainConfig::from_toml_str("ema_decay = 1.0\n").is_err());
    }
}
