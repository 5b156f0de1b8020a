//! Minimal dense network: ReLU hidden layers, scalar sigmoid head, manual
//! backpropagation, Nesterov SGD and an EMA shadow copy of the parameters.

mod checkpoint;
mod ema;
mod mlp;
mod optim;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use ema::EmaModel;
pub use mlp::{ForwardCache, Gradients, Layer, MlpModel};
pub use optim::{OptimizerState, SgdConfig};

/// Numerically stable logistic sigmoid.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
