//! MNIST IDX readers. Files may be raw or gzip-compressed (detected by the
//! gzip magic bytes); the IDX payload itself is big-endian per the canonical
//! layout: magic, dimension sizes, then the data.

use std::io::Read;
use std::path::Path;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if raw.len() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b {
        let mut out = Vec::new();
        flate2::read::GzDecoder::new(&raw[..])
            .read_to_end(&mut out)
            .map_err(|e| Error::IdxFormat {
                path: path.to_path_buf(),
                message: format!("gzip decode failed: {e}"),
            })?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::IdxFormat {
            path: path.to_path_buf(),
            message: "truncated header".into(),
        })
}

/// Images as rows of `rows*cols` pixels scaled to [0,1].
pub fn load_idx_images(path: &Path) -> Result<Matrix> {
    let bytes = read_bytes(path)?;
    let magic = be_u32(&bytes, 0, path)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::IdxFormat {
            path: path.to_path_buf(),
            message: format!("bad magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"),
        });
    }
    let n = be_u32(&bytes, 4, path)? as usize;
    let rows = be_u32(&bytes, 8, path)? as usize;
    let cols = be_u32(&bytes, 12, path)? as usize;
    let payload = &bytes[16..];
    if payload.len() != n * rows * cols {
        return Err(Error::IdxFormat {
            path: path.to_path_buf(),
            message: format!(
                "truncated payload: {} bytes for {n}x{rows}x{cols}",
                payload.len()
            ),
        });
    }
    let data: Vec<f64> = payload.iter().map(|&b| b as f64 / 255.0).collect();
    Matrix::from_vec(n, rows * cols, data)
}

pub fn load_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let bytes = read_bytes(path)?;
    let magic = be_u32(&bytes, 0, path)?;
    if magic != LABELS_MAGIC {
        return Err(Error::IdxFormat {
            path: path.to_path_buf(),
            message: format!("bad magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"),
        });
    }
    let n = be_u32(&bytes, 4, path)? as usize;
    let payload = &bytes[8..];
    if payload.len() != n {
        return Err(Error::IdxFormat {
            path: path.to_path_buf(),
            message: format!("truncated payload: {} bytes for {n} labels", payload.len()),
        });
    }
    Ok(payload.to_vec())
}

/// Binary task from two digits: rows with `positive_digit` get label 1,
/// rows with `negative_digit` get label 0, everything else is dropped.
pub fn load_mnist_pair(
    idx_images: &Path,
    idx_labels: &Path,
    positive_digit: u8,
    negative_digit: u8,
) -> Result<LabeledDataset> {
    if positive_digit == negative_digit {
        return Err(Error::InvalidArgument(format!(
            "positive and negative digit are both {positive_digit}"
        )));
    }
    let images = load_idx_images(idx_images)?;
    let digits = load_idx_labels(idx_labels)?;
    if images.rows() != digits.len() {
        return Err(Error::shape(
            format!("{} labels", images.rows()),
            format!("{} labels", digits.len()),
            "mnist image/label row counts",
        ));
    }
    let mut keep = Vec::new();
    let mut labels = Vec::new();
    for (i, &d) in digits.iter().enumerate() {
        if d == positive_digit {
            keep.push(i);
            labels.push(1);
        } else if d == negative_digit {
            keep.push(i);
            labels.push(0);
        }
    }
    LabeledDataset::new(
        images.select_rows(&keep),
        labels,
        format!("mnist-{positive_digit}v{negative_digit}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_idx_images(dir: &Path, pixels: &[[u8; 4]]) -> std::path::PathBuf {
        // 2x2 "images"
        let path = dir.join("images.idx");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&(pixels.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        for p in pixels {
            bytes.extend_from_slice(p);
        }
        std::fs::File::create(&path).unwrap().write_all(&bytes).unwrap();
        path
    }

    fn write_idx_labels(dir: &Path, labels: &[u8]) -> std::path::PathBuf {
        let path = dir.join("labels.idx");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        bytes.extend_from_slice(labels);
        std::fs::File::create(&path).unwrap().write_all(&bytes).unwrap();
        path
    }

    #[test]
    fn pair_selection_and_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let images = write_idx_images(dir.path(), &[[255, 0, 0, 0], [1, 2, 3, 4], [0, 255, 0, 0]]);
        let labels = write_idx_labels(dir.path(), &[0, 7, 1]);
        let ds = load_mnist_pair(&images, &labels, 0, 1).unwrap();
        assert_eq!(ds.len(), 2); // digit 7 dropped
        assert_eq!(ds.labels, vec![1, 0]);
        assert_eq!(ds.features.get(0, 0), 1.0); // pixel 255 -> 1.0
        assert_eq!(ds.features.get(1, 1), 1.0);
    }

    #[test]
    fn same_digit_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let images = write_idx_images(dir.path(), &[[0; 4]]);
        let labels = write_idx_labels(dir.path(), &[0]);
        assert!(load_mnist_pair(&images, &labels, 3, 3).is_err());
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.idx");
        std::fs::write(&path, 0xdeadbeefu32.to_be_bytes()).unwrap();
        let err = load_idx_images(&path).unwrap_err().to_string();
        assert!(err.contains("bad magic"), "{err}");
    }

    #[test]
    fn truncated_payload_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.idx");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&5u32.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&[0u8; 3]); // far too short
        std::fs::write(&path, bytes).unwrap();
        let err = load_idx_images(&path).unwrap_err().to_string();
        assert!(err.contains("truncated"), "{err}");
    }
}
