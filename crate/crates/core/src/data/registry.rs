use std::path::{Path, PathBuf};

use super::csv_load::load_csv;
use super::dataset::{LabeledDataset, Standardizer};
use super::idx::load_mnist_pair;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Where a dataset comes from: a registry name or an explicit CSV path.
///
/// Registered names: `titanic`, `spambase`, `krvskp` (CSV files in the data
/// directory, 70/30 seeded split, standardized on the training split) and
/// `mnist-<p>v<d>` (IDX files under `<data_dir>/mnist/`, canonical
/// train/test split, pixels scaled to [0,1] with no standardization).
#[derive(Debug, Clone)]
pub enum DataSource {
    Named(String),
    Csv { path: PathBuf, label_column: String },
}

impl DataSource {
    /// Interpret a CLI-style argument: a known name, or a path to a CSV.
    pub fn parse(arg: &str, label_column: &str) -> DataSource {
        let known = matches!(arg, "titanic" | "spambase" | "krvskp") || arg.starts_with("mnist-");
        if known {
            DataSource::Named(arg.to_string())
        } else {
            DataSource::Csv {
                path: PathBuf::from(arg),
                label_column: label_column.to_string(),
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            DataSource::Named(n) => n.clone(),
            DataSource::Csv { path, .. } => path.to_string_lossy().into_owned(),
        }
    }
}

fn uci_label_column(name: &str) -> &'static str {
    match name {
        "titanic" => "survived",
        _ => "target",
    }
}

fn parse_mnist_task(name: &str) -> Option<(u8, u8)> {
    let rest = name.strip_prefix("mnist-")?;
    let (p, n) = rest.split_once('v')?;
    Some((p.parse().ok()?, n.parse().ok()?))
}

fn mnist_file(dir: &Path, base: &str) -> Result<PathBuf> {
    let gz = dir.join(format!("{base}.gz"));
    if gz.exists() {
        return Ok(gz);
    }
    let raw = dir.join(base);
    if raw.exists() {
        return Ok(raw);
    }
    Err(Error::Parse {
        path: gz,
        message: "MNIST IDX file not found (looked for .gz and raw)".into(),
    })
}

fn split_and_standardize(
    dataset: &LabeledDataset,
    split_seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let mut rng = rng::stream(split_seed, Stream::Split);
    let (train, test) = dataset.train_test_split(0.7, &mut rng)?;
    let standardizer = Standardizer::fit(&train);
    Ok((standardizer.apply(&train), standardizer.apply(&test)))
}

/// Resolve a data source into standardized train/test splits.
pub fn load_dataset(
    source: &DataSource,
    data_dir: &Path,
    split_seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    match source {
        DataSource::Named(name) => {
            if let Some((pos, neg)) = parse_mnist_task(name) {
                let dir = data_dir.join("mnist");
                let train = load_mnist_pair(
                    &mnist_file(&dir, "train-images-idx3-ubyte")?,
                    &mnist_file(&dir, "train-labels-idx1-ubyte")?,
                    pos,
                    neg,
                )?;
                let test = load_mnist_pair(
                    &mnist_file(&dir, "t10k-images-idx3-ubyte")?,
                    &mnist_file(&dir, "t10k-labels-idx1-ubyte")?,
                    pos,
                    neg,
                )?;
                return Ok((train, test));
            }
            match name.as_str() {
                "titanic" | "spambase" | "krvskp" => {
                    let path = data_dir.join(format!("{name}.csv"));
                    let full = load_csv(&path, uci_label_column(name))?;
                    split_and_standardize(&full, split_seed)
                }
                other => Err(Error::UnknownDataset(other.to_string())),
            }
        }
        DataSource::Csv { path, label_column } => {
            let full = load_csv(path, label_column)?;
            split_and_standardize(&full, split_seed)
        }
    }
}
