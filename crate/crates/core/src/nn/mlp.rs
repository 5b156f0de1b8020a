use rand::Rng as _;

use super::sigmoid;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;

/// One dense layer. Weights are `[fan_out x fan_in]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Layer {
            weights: Matrix::zeros(fan_out, fan_in),
            bias: vec![0.0; fan_out],
        }
    }

    pub fn fan_in(&self) -> usize {
        self.weights.cols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.rows()
    }
}

/// Fully connected network with ReLU hidden activations and a scalar
/// sigmoid output head. The final layer must have fan_out 1; `forward`
/// returns one score in (0,1) per input row.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<Layer>,
}

impl MlpModel {
    /// Build from a dimension chain, e.g. `[d, 100, 100, 1]`.
    /// Weights and biases are uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn new(dims: &[usize], rng: &mut Rng) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidArgument(
                "model needs at least one layer".into(),
            ));
        }
        if *dims.last().unwrap() != 1 {
            return Err(Error::InvalidArgument(
                "output head must be scalar (fan_out 1)".into(),
            ));
        }
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let mut layer = Layer::zeros(fan_in, fan_out);
            for v in layer.weights.data_mut() {
                *v = rng.random_range(-bound..=bound);
            }
            for v in &mut layer.bias {
                *v = rng.random_range(-bound..=bound);
            }
            layers.push(layer);
        }
        Ok(MlpModel { layers })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("no layers".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].fan_out() != pair[1].fan_in() {
                return Err(Error::shape(
                    format!("fan_in {}", pair[0].fan_out()),
                    format!("fan_in {}", pair[1].fan_in()),
                    "layer dimension chain",
                ));
            }
        }
        if layers.last().unwrap().fan_out() != 1 {
            return Err(Error::InvalidArgument(
                "output head must be scalar (fan_out 1)".into(),
            ));
        }
        Ok(MlpModel { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.data().len() + l.bias.len())
            .sum()
    }

    /// Forward pass keeping the per-layer activations needed by `backward`.
    pub fn forward_cache(&self, inputs: &Matrix) -> Result<ForwardCache> {
        if inputs.cols() != self.input_dim() {
            return Err(Error::shape(
                format!("{} columns", self.input_dim()),
                format!("{} columns", inputs.cols()),
                "forward input width",
            ));
        }
        let batch = inputs.rows();
        let mut layer_inputs = Vec::with_capacity(self.layers.len());
        let mut preacts = Vec::with_capacity(self.layers.len());
        let mut current = inputs.clone();
        for (li, layer) in self.layers.iter().enumerate() {
            let mut z = current.matmul_nt(&layer.weights); // [B x fan_out]
            for i in 0..batch {
                let row = z.row_mut(i);
                for (v, b) in row.iter_mut().zip(&layer.bias) {
                    *v += b;
                }
            }
            layer_inputs.push(current);
            if li + 1 < self.layers.len() {
                let mut a = z.clone();
                for v in a.data_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
                current = a;
            } else {
                current = Matrix::zeros(0, 0); // unused past the head
            }
            preacts.push(z);
        }
        let logits: Vec<f64> = (0..batch).map(|i| preacts.last().unwrap().get(i, 0)).collect();
        let scores: Vec<f64> = logits.iter().map(|&z| sigmoid(z)).collect();
        Ok(ForwardCache {
            layer_inputs,
            preacts,
            logits,
            scores,
        })
    }

    /// Sigmoid scores in (0,1), one per input row.
    pub fn forward(&self, inputs: &Matrix) -> Result<Vec<f64>> {
        Ok(self.forward_cache(inputs)?.scores)
    }

    /// Pre-sigmoid scalar outputs (real-valued score head).
    pub fn forward_logits(&self, inputs: &Matrix) -> Result<Vec<f64>> {
        Ok(self.forward_cache(inputs)?.logits)
    }

    /// Backpropagate `dL/dscore` (gradient w.r.t. the sigmoid outputs)
    /// through the cached forward pass, accumulating into `grads`.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        grad_scores: &[f64],
        grads: &mut Gradients,
    ) -> Result<()> {
        if grad_scores.len() != cache.scores.len() {
            return Err(Error::shape(
                format!("{} rows", cache.scores.len()),
                format!("{} rows", grad_scores.len()),
                "backward batch size",
            ));
        }
        // dL/dz = dL/dp * sigma'(z), sigma'(z) = p(1-p)
        let grad_logits: Vec<f64> = grad_scores
            .iter()
            .zip(&cache.scores)
            .map(|(&g, &p)| g * p * (1.0 - p))
            .collect();
        self.backward_logits(cache, &grad_logits, grads)
    }

    /// Backpropagate `dL/dlogit` (gradient w.r.t. the pre-sigmoid head).
    pub fn backward_logits(
        &self,
        cache: &ForwardCache,
        grad_logits: &[f64],
        grads: &mut Gradients,
    ) -> Result<()> {
        let batch = cache.scores.len();
        if grad_logits.len() != batch {
            return Err(Error::shape(
                format!("{batch} rows"),
                format!("{} rows", grad_logits.len()),
                "backward batch size",
            ));
        }
        if grads.layers.len() != self.layers.len() {
            return Err(Error::shape(
                format!("{} layers", self.layers.len()),
                format!("{} layers", grads.layers.len()),
                "gradient buffer",
            ));
        }
        let mut delta = Matrix::from_vec(batch, 1, grad_logits.to_vec())?;
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let x = &cache.layer_inputs[li];
            // dW = delta^T * X, db = column sums of delta
            let dw = delta.matmul_tn(x);
            let g = &mut grads.layers[li];
            for (acc, v) in g.weights.data_mut().iter_mut().zip(dw.data()) {
                *acc += v;
            }
            for j in 0..layer.fan_out() {
                let mut s = 0.0;
                for i in 0..batch {
                    s += delta.get(i, j);
                }
                g.bias[j] += s;
            }
            if li > 0 {
                // delta_prev = (delta * W) .* relu'(Z_prev)
                let mut prev = delta.matmul(&layer.weights); // [B x fan_in]
                let z_prev = &cache.preacts[li - 1];
                for (v, &z) in prev.data_mut().iter_mut().zip(z_prev.data()) {
                    if z <= 0.0 {
                        *v = 0.0;
                    }
                }
                delta = prev;
            }
        }
        Ok(())
    }
}

/// Cached activations from one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    layer_inputs: Vec<Matrix>,
    preacts: Vec<Matrix>,
    pub logits: Vec<f64>,
    pub scores: Vec<f64>,
}

/// Parameter gradients, same shapes as the model.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            layers: model
                .layers()
                .iter()
                .map(|l| Layer::zeros(l.fan_in(), l.fan_out()))
                .collect(),
        }
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            for v in l.weights.data_mut() {
                *v *= s;
            }
            for v in &mut l.bias {
                *v *= s;
            }
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weights.data_mut().iter_mut().zip(b.weights.data()) {
                *x += s * y;
            }
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += s * y;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.data().iter().all(|v| v.is_finite()) && l.bias.iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn single_layer(w: f64, b: f64) -> MlpModel {
        MlpModel::from_layers(vec![Layer {
            weights: Matrix::from_vec(1, 1, vec![w]).unwrap(),
            bias: vec![b],
        }])
        .unwrap()
    }

    #[test]
    fn zero_model_scores_half() {
        let model = MlpModel::from_layers(vec![
            Layer::zeros(3, 4),
            Layer::zeros(4, 1),
        ])
        .unwrap();
        let x = Matrix::from_vec(2, 3, vec![0.5, -1.0, 2.0, 0.0, 3.0, -4.0]).unwrap();
        let scores = model.forward(&x).unwrap();
        assert_eq!(scores, vec![0.5, 0.5]);
    }

    #[test]
    fn single_layer_matches_sigmoid_table() {
        // independently computed sigmoid values for w=1, b=0
        let expected = [
            (-2.0, 0.11920292202211755),
            (-1.0, 0.2689414213699951),
            (1.0, 0.7310585786300049),
            (2.0, 0.8807970779778823),
        ];
        let model = single_layer(1.0, 0.0);
        for (x, want) in expected {
            let got = model.forward(&Matrix::from_vec(1, 1, vec![x]).unwrap()).unwrap()[0];
            assert!((got - want).abs() < 1e-15, "x={x}: {got} vs {want}");
        }
        // and sigmoid(0) = 0.5
        assert_eq!(
            model.forward(&Matrix::from_vec(1, 1, vec![0.0]).unwrap()).unwrap()[0],
            0.5
        );
    }

    #[test]
    fn forward_rejects_width_mismatch() {
        let mut r = rng::from_seed(0);
        let model = MlpModel::new(&[3, 4, 1], &mut r).unwrap();
        let x = Matrix::zeros(2, 5);
        assert!(matches!(model.forward(&x), Err(crate::error::Error::Shape { .. })));
    }

    #[test]
    fn scores_strictly_inside_unit_interval() {
        let mut r = rng::from_seed(7);
        let model = MlpModel::new(&[4, 8, 8, 1], &mut r).unwrap();
        let mut xr = rng::from_seed(8);
        let x = Matrix::from_vec(
            16,
            4,
            (0..64).map(|_| rand::Rng::random_range(&mut xr, -5.0..5.0)).collect(),
        )
        .unwrap();
        for s in model.forward(&x).unwrap() {
            assert!(s > 0.0 && s < 1.0);
        }
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_grads() {
        let mut r = rng::from_seed(1);
        let model = MlpModel::new(&[3, 5, 1], &mut r).unwrap();
        let x = Matrix::from_vec(2, 3, vec![1.0, -2.0, 0.5, 0.0, 1.0, 2.0]).unwrap();
        let cache = model.forward_cache(&x).unwrap();
        let mut grads = Gradients::zeros_like(&model);
        model.backward(&cache, &[0.0, 0.0], &mut grads).unwrap();
        for l in &grads.layers {
            assert!(l.weights.data().iter().all(|&v| v == 0.0));
            assert!(l.bias.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn backward_rejects_batch_mismatch() {
        let mut r = rng::from_seed(2);
        let model = MlpModel::new(&[2, 1], &mut r).unwrap();
        let x = Matrix::zeros(3, 2);
        let cache = model.forward_cache(&x).unwrap();
        let mut grads = Gradients::zeros_like(&model);
        assert!(model.backward(&cache, &[1.0, 1.0], &mut grads).is_err());
    }

    #[test]
    fn scalar_model_matches_hand_derived_gradient() {
        // squared error at one point: L = (sigmoid(wx+b) - t)^2
        // dL/dw = 2 (p - t) p (1 - p) x, dL/db = 2 (p - t) p (1 - p)
        let (w, b, x, t) = (0.7, -0.3, 1.4, 1.0);
        let model = single_layer(w, b);
        let input = Matrix::from_vec(1, 1, vec![x]).unwrap();
        let cache = model.forward_cache(&input).unwrap();
        let p = cache.scores[0];
        let mut grads = Gradients::zeros_like(&model);
        model.backward(&cache, &[2.0 * (p - t)], &mut grads).unwrap();
        let expect_dw = 2.0 * (p - t) * p * (1.0 - p) * x;
        let expect_db = 2.0 * (p - t) * p * (1.0 - p);
        assert!((grads.layers[0].weights.get(0, 0) - expect_dw).abs() < 1e-14);
        assert!((grads.layers[0].bias[0] - expect_db).abs() < 1e-14);
    }

    #[test]
    fn param_count_stable() {
        let mut r = rng::from_seed(3);
        let model = MlpModel::new(&[7, 16, 16, 1], &mut r).unwrap();
        assert_eq!(model.param_count(), 7 * 16 + 16 + 16 * 16 + 16 + 16 + 1);
    }
}
