//! Per-epoch run records and their CSV form.
//!
//! One row per epoch: `epoch,loss_pn,loss_u,loss_pu,train_error,test_error,
//! test_auc`. The risk-estimator baselines train a single scalar objective;
//! they record it under `loss_pn` and leave the other loss columns at 0.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss_pn: f64,
    pub loss_u: f64,
    pub loss_pu: f64,
    pub train_error: f64,
    pub test_error: f64,
    pub test_auc: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub epochs: Vec<EpochRecord>,
    /// Set when training aborted early (non-finite loss); the records above
    /// are the partial trajectory up to the failure.
    pub diverged: Option<String>,
}

impl RunReport {
    pub fn final_record(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }

    /// First epoch whose test AUC reaches `target`, if any.
    pub fn epochs_to_auc(&self, target: f64) -> Option<usize> {
        self.epochs.iter().find(|r| r.test_auc >= target).map(|r| r.epoch)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epoch,loss_pn,loss_u,loss_pu,train_error,test_error,test_auc\n");
        for r in &self.epochs {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.epoch, r.loss_pn, r.loss_u, r.loss_pu, r.train_error, r.test_error, r.test_auc
            )
            .unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

/// Mean and (population) standard deviation of a sample.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}
