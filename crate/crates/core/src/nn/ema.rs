use super::mlp::MlpModel;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Exponential-moving-average shadow of a model's parameters.
///
/// After each update with decay `d`: `shadow <- d * shadow + (1 - d) * theta`.
/// The shadow acts as the teacher: it scores inputs but never receives
/// gradients.
#[derive(Debug, Clone)]
pub struct EmaModel {
    shadow: MlpModel,
    decay: f64,
}

impl EmaModel {
    /// Initialize the shadow as a copy of the current model.
    pub fn new(model: &MlpModel, decay: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&decay) {
            return Err(Error::InvalidArgument("ema decay must be in [0,1)".into()));
        }
        Ok(EmaModel {
            shadow: model.clone(),
            decay,
        })
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn model(&self) -> &MlpModel {
        &self.shadow
    }

    pub fn update(&mut self, model: &MlpModel) -> Result<()> {
        if self.shadow.layers().len() != model.layers().len() {
            return Err(Error::shape(
                format!("{} layers", self.shadow.layers().len()),
                format!("{} layers", model.layers().len()),
                "ema update",
            ));
        }
        let d = self.decay;
        for (s, m) in self.shadow.layers_mut().iter_mut().zip(model.layers()) {
            if s.fan_in() != m.fan_in() || s.fan_out() != m.fan_out() {
                return Err(Error::shape(
                    format!("{}x{}", s.fan_out(), s.fan_in()),
                    format!("{}x{}", m.fan_out(), m.fan_in()),
                    "ema update",
                ));
            }
            for (sv, mv) in s.weights.data_mut().iter_mut().zip(m.weights.data()) {
                *sv = d * *sv + (1.0 - d) * mv;
            }
            for (sv, mv) in s.bias.iter_mut().zip(&m.bias) {
                *sv = d * *sv + (1.0 - d) * mv;
            }
        }
        Ok(())
    }

    /// Teacher scores: forward through the shadow parameters.
    pub fn forward(&self, inputs: &Matrix) -> Result<Vec<f64>> {
        self.shadow.forward(inputs)
    }
}
