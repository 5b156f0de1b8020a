//! Model checkpoint format (text, version-tagged).
//!
//! ```text
//! mixpul-mlp-v1
//! layers <L>
//! layer <fan_in> <fan_out>
//! <fan_out lines of fan_in weights, row-major>
//! <one line of fan_out biases>
//! ... repeated per layer ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! save -> load -> forward cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use super::mlp::{Layer, MlpModel};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const MAGIC: &str = "mixpul-mlp-v1";

pub fn save_checkpoint(model: &MlpModel, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    writeln!(out, "layers {}", model.layers().len()).unwrap();
    for layer in model.layers() {
        writeln!(out, "layer {} {}", layer.fan_in(), layer.fan_out()).unwrap();
        for i in 0..layer.fan_out() {
            let row = layer.weights.row(i);
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                write!(out, "{v}").unwrap();
                first = false;
            }
            out.push('\n');
        }
        let mut first = true;
        for v in &layer.bias {
            if !first {
                out.push(' ');
            }
            write!(out, "{v}").unwrap();
            first = false;
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<MlpModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: &str| Error::Checkpoint {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing or unknown format tag"));
    }
    let count_line = lines.next().ok_or_else(|| bad("truncated header"))?;
    let layer_count: usize = count_line
        .strip_prefix("layers ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad layer count"))?;
    let mut layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let dims = lines.next().ok_or_else(|| bad("truncated layer header"))?;
        let mut parts = dims
            .strip_prefix("layer ")
            .ok_or_else(|| bad("bad layer header"))?
            .split_whitespace();
        let fan_in: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad fan_in"))?;
        let fan_out: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad fan_out"))?;
        let mut weights = Vec::with_capacity(fan_in * fan_out);
        for _ in 0..fan_out {
            let row = lines.next().ok_or_else(|| bad("truncated weights"))?;
            for tok in row.split_whitespace() {
                weights.push(tok.parse::<f64>().map_err(|_| bad("bad weight value"))?);
            }
        }
        if weights.len() != fan_in * fan_out {
            return Err(bad("weight count mismatch"));
        }
        let bias_line = lines.next().ok_or_else(|| bad("truncated biases"))?;
        let bias: Vec<f64> = bias_line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| bad("bad bias value")))
            .collect::<Result<_>>()?;
        if bias.len() != fan_out {
            return Err(bad("bias count mismatch"));
        }
        layers.push(Layer {
            weights: Matrix::from_vec(fan_out, fan_in, weights)?,
            bias,
        });
    }
    MlpModel::from_layers(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut r = rng::from_seed(11);
        let model = MlpModel::new(&[5, 9, 1], &mut r).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&model, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(model, loaded);
        // forward agrees bit-for-bit
        let x = Matrix::from_vec(3, 5, (0..15).map(|i| i as f64 * 0.37 - 2.0).collect()).unwrap();
        let a = model.forward(&x).unwrap();
        let b = loaded.forward(&x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        std::fs::write(&path, "not a checkpoint\n").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
