//! Positive-unlabeled learning with interpolation consistency.
//!
//! The crate trains a small MLP from labeled positives and an unlabeled pool
//! by mixing positives with mined reliable negatives and unlabeled points
//! with each other, holding the model to the interpolated targets, and
//! ranking positives above the unlabeled pool by a margin. The classical
//! unbiased (uPU) and nonnegative (nnPU) risk estimators and a supervised
//! reference are included as baselines, together with a seeded experiment
//! harness whose every number replays bit-exactly from a manifest.

pub mod baselines;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod linalg;
pub mod mixpul;
pub mod nn;
pub mod report;
pub mod rn;
pub mod rng;

pub use config::TrainConfig;
pub use error::{Error, Result};
pub use report::{EpochRecord, RunReport};
