use std::path::Path;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Load a comma-delimited numeric table with a header row. The named label
/// column must contain 0/1; every other column becomes a feature.
///
/// Standardization is not applied here: it belongs to the pipeline, after
/// the train/test split (see [`super::registry::load_dataset`]).
pub fn load_csv(path: &Path, label_column: &str) -> Result<LabeledDataset> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| parse_err(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| parse_err(format!("missing label column `{label_column}`")))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let mut row = Vec::with_capacity(headers.len().saturating_sub(1));
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                parse_err(format!(
                    "non-numeric cell `{field}` at row {} column `{}`",
                    line + 2,
                    &headers[col]
                ))
            })?;
            if col == label_idx {
                let label = if value == 0.0 {
                    0u8
                } else if value == 1.0 {
                    1u8
                } else {
                    return Err(parse_err(format!(
                        "label `{value}` at row {} is not 0 or 1",
                        line + 2
                    )));
                };
                labels.push(label);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err("no data rows".into()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    LabeledDataset::new(Matrix::from_rows(&rows)?, labels, name)
}
