use serde::{Deserialize, Serialize};

use super::mlp::{Gradients, Layer, MlpModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SgdConfig {
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            lr: 1e-3,
            momentum: 0.9,
            weight_decay: 1e-4,
        }
    }
}

/// SGD with Nesterov momentum and decoupled-into-gradient L2 weight decay.
///
/// Update rule (per parameter):
/// ```text
/// g <- grad + weight_decay * theta
/// v <- momentum * v + g
/// theta <- theta - lr * (g + momentum * v)   (momentum > 0)
/// theta <- theta - lr * g                    (momentum = 0)
/// ```
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub config: SgdConfig,
    velocity: Vec<Layer>,
}

impl OptimizerState {
    pub fn new(config: SgdConfig, model: &MlpModel) -> Result<Self> {
        if config.lr <= 0.0 {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&config.momentum) {
            return Err(Error::InvalidArgument("momentum must be in [0,1)".into()));
        }
        if config.weight_decay < 0.0 {
            return Err(Error::InvalidArgument("weight decay must be nonnegative".into()));
        }
        Ok(OptimizerState {
            config,
            velocity: model
                .layers()
                .iter()
                .map(|l| Layer::zeros(l.fan_in(), l.fan_out()))
                .collect(),
        })
    }

    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients) -> Result<()> {
        if !grads.is_finite() {
            return Err(Error::Divergence("non-finite gradients".into()));
        }
        if grads.layers.len() != self.velocity.len() {
            return Err(Error::shape(
                format!("{} layers", self.velocity.len()),
                format!("{} layers", grads.layers.len()),
                "sgd step",
            ));
        }
        let SgdConfig {
            lr,
            momentum,
            weight_decay,
        } = self.config;
        for ((layer, grad), vel) in model
            .layers_mut()
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut self.velocity)
        {
            apply(
                layer.weights.data_mut(),
                grad.weights.data(),
                vel.weights.data_mut(),
                lr,
                momentum,
                weight_decay,
            );
            apply(&mut layer.bias, &grad.bias, &mut vel.bias, lr, momentum, weight_decay);
        }
        Ok(())
    }
}

fn apply(theta: &mut [f64], grad: &[f64], vel: &mut [f64], lr: f64, momentum: f64, wd: f64) {
    for i in 0..theta.len() {
        let g = grad[i] + wd * theta[i];
        if momentum > 0.0 {
            vel[i] = momentum * vel[i] + g;
            theta[i] -= lr * (g + momentum * vel[i]);
        } else {
            theta[i] -= lr * g;
        }
    }
}
