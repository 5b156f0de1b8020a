//! Dataset ingestion (CSV, MNIST IDX), PU-problem construction with a
//! controllable class-frequency, and mini-batch sampling.

mod batch;
mod csv_load;
mod dataset;
mod idx;
mod pu;
mod registry;

pub use batch::{BatchPlan, TrainBatch};
pub use csv_load::load_csv;
pub use dataset::{LabeledDataset, Standardizer};
pub use idx::{load_idx_images, load_idx_labels, load_mnist_pair};
pub use pu::{make_pu, make_pu_by_count, pu_from_manifest, PuSplitManifest, PUDataset};
pub use registry::{load_dataset, DataSource};
