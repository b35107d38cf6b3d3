//! Checkpoints, CSV datasets and the IDX raster format.

use std::fs;
use std::path::Path;

use m2m_core::datasets::LabeledDataset;
use m2m_core::netcore::{decode_net, encode_net, Matrix, Net};

use crate::error::{Error, Result};

pub fn save_checkpoint(path: &Path, net: &Net) -> Result<()> {
    fs::write(path, encode_net(net)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Net> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(decode_net(&bytes)?)
}

/// Writes `x0,...,x{d-1},label` rows. Labels are the dataset's original
/// class ids, so a round trip reproduces the same labelling.
pub fn write_csv(path: &Path, data: &LabeledDataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header: Vec<String> = (0..data.dim()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    let ids = data.class_ids();
    for i in 0..data.len() {
        let (x, y) = data.sample(i);
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        row.push(ids[y].to_string());
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a CSV written by [`write_csv`]: feature columns followed by an
/// integer `label` column with ids `0..K`.
pub fn read_csv(path: &Path) -> Result<LabeledDataset> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 2 || &header[header.len() - 1] != "label" {
        return Err(Error::format(path, "last column must be `label`"));
    }
    let dim = header.len() - 1;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = line + 2;
        for field in record.iter().take(dim) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::format(path, format!("row {row}: bad number `{field}`")))?;
            values.push(v);
        }
        let raw = &record[dim];
        let y: usize = raw
            .trim()
            .parse()
            .map_err(|_| Error::format(path, format!("row {row}: bad label `{raw}`")))?;
        labels.push(y);
    }
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let inputs = Matrix::from_vec(labels.len(), dim, values)?;
    Ok(LabeledDataset::new(inputs, labels, classes)?)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::format(path, e.to_string())
}

const IDX_IMAGES: u32 = 0x0000_0803;
const IDX_LABELS: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], at: usize) -> Option<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

/// Parses an IDX image file (`u8`, three dimensions) into flattened rows
/// scaled to `[0, 1]`.
pub fn parse_idx_images(bytes: &[u8]) -> std::result::Result<Matrix, String> {
    let magic = be_u32(bytes, 0).ok_or("truncated header")?;
    if magic != IDX_IMAGES {
        return Err(format!("bad image magic {magic:#010x}"));
    }
    let dims: Vec<usize> = (0..3)
        .map(|i| be_u32(bytes, 4 + 4 * i).map(|v| v as usize))
        .collect::<Option<_>>()
        .ok_or("truncated header")?;
    let (n, dim) = (dims[0], dims[1] * dims[2]);
    let body = &bytes[16..];
    if body.len() != n * dim {
        return Err(format!("expected {} pixel bytes, found {}", n * dim, body.len()));
    }
    let values = body.iter().map(|&b| f64::from(b) / 255.0).collect();
    Matrix::from_vec(n, dim, values).map_err(|e| e.to_string())
}

/// Parses an IDX label file (`u8`, one dimension).
pub fn parse_idx_labels(bytes: &[u8]) -> std::result::Result<Vec<usize>, String> {
    let magic = be_u32(bytes, 0).ok_or("truncated header")?;
    if magic != IDX_LABELS {
        return Err(format!("bad label magic {magic:#010x}"));
    }
    let n = be_u32(bytes, 4).ok_or("truncated header")? as usize;
    let body = &bytes[8..];
    if body.len() != n {
        return Err(format!("expected {n} labels, found {}", body.len()));
    }
    Ok(body.iter().map(|&b| usize::from(b)).collect())
}

pub fn load_idx(images: &Path, labels: &Path) -> Result<LabeledDataset> {
    let image_bytes = fs::read(images).map_err(|e| Error::io(images, e))?;
    let label_bytes = fs::read(labels).map_err(|e| Error::io(labels, e))?;
    let inputs = parse_idx_images(&image_bytes).map_err(|m| Error::format(images, m))?;
    let labels_vec = parse_idx_labels(&label_bytes).map_err(|m| Error::format(labels, m))?;
    if labels_vec.len() != inputs.rows() {
        return Err(Error::format(
            labels,
            format!("{} labels for {} images", labels_vec.len(), inputs.rows()),
        ));
    }
    let classes = labels_vec.iter().max().map_or(0, |&m| m + 1);
    Ok(LabeledDataset::new(inputs, labels_vec, classes)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_images(n: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut out = IDX_IMAGES.to_be_bytes().to_vec();
        for v in [n, rows, cols] {
            out.extend_from_slice(&v.to_be_bytes());
        }
        out.extend_from_slice(pixels);
        out
    }

    #[test]
    fn idx_images_scale_to_unit_interval() {
        let m = parse_idx_images(&idx_images(2, 1, 2, &[0, 255, 51, 102])).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.row(0), &[0.0, 1.0]);
        assert_eq!(m.row(1), &[0.2, 0.4]);
    }

    #[test]
    fn idx_rejects_bad_magic_and_truncation() {
        let mut bytes = idx_images(1, 2, 2, &[1, 2, 3, 4]);
        assert!(parse_idx_images(&bytes[..bytes.len() - 1]).is_err());
        bytes[3] = 0x01;
        assert!(parse_idx_images(&bytes).is_err());
        assert!(parse_idx_labels(&[0, 0, 8, 1, 0, 0, 0, 2, 7]).is_err());
        assert_eq!(parse_idx_labels(&[0, 0, 8, 1, 0, 0, 0, 2, 7, 3]).unwrap(), [7, 3]);
    }
}
