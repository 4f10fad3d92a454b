//! IDX image/label files.
//!
//! Big-endian throughout: a `u32` magic, one `u32` per dimension, then raw
//! `u8` payload.

use std::fs;
use std::path::Path;

use super::SamplePair;
use crate::error::{Error, Result};
use crate::linalg::ComplexVector;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MnistSet {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows * cols` pixel grids.
    pub images: Vec<Vec<u8>>,
    pub labels: Vec<u8>,
}

impl MnistSet {
    pub fn new(rows: usize, cols: usize, images: Vec<Vec<u8>>, labels: Vec<u8>) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::CountMismatch {
                images: images.len(),
                labels: labels.len(),
            });
        }
        if let Some(img) = images.iter().find(|img| img.len() != rows * cols) {
            return Err(Error::DimensionMismatch {
                context: "image pixels",
                expected: rows * cols,
                found: img.len(),
            });
        }
        if let Some(l) = labels.iter().find(|&&l| l > 9) {
            return Err(Error::InvalidParameter(format!("label {l} outside 0..=9")));
        }
        Ok(Self {
            rows,
            cols,
            images,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
}

impl Cursor<'_> {
    fn header(&self, words: usize) -> Result<Vec<usize>> {
        let needed = 4 * words;
        if self.bytes.len() < needed {
            return Err(Error::TruncatedFile {
                needed,
                found: self.bytes.len(),
            });
        }
        Ok(self.bytes[..needed]
            .chunks_exact(4)
            .map(|w| u32::from_be_bytes([w[0], w[1], w[2], w[3]]) as usize)
            .collect())
    }

    fn payload(&self, offset: usize, len: usize) -> Result<&[u8]> {
        let needed = offset + len;
        if self.bytes.len() < needed {
            return Err(Error::TruncatedFile {
                needed,
                found: self.bytes.len(),
            });
        }
        Ok(&self.bytes[offset..needed])
    }
}

fn check_magic(expected: u32, found: usize) -> Result<()> {
    if found as u32 != expected {
        return Err(Error::BadMagic {
            expected,
            found: found as u32,
        });
    }
    Ok(())
}

/// Returns `(rows, cols, images)`.
pub fn read_idx_images(bytes: &[u8]) -> Result<(usize, usize, Vec<Vec<u8>>)> {
    let cur = Cursor { bytes };
    check_magic(IMAGE_MAGIC, cur.header(1)?[0])?;
    let head = cur.header(4)?;
    let (count, rows, cols) = (head[1], head[2], head[3]);
    let data = cur.payload(16, count * rows * cols)?;
    let images = if rows * cols == 0 {
        vec![Vec::new(); count]
    } else {
        data.chunks_exact(rows * cols).map(<[u8]>::to_vec).collect()
    };
    Ok((rows, cols, images))
}

pub fn read_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let cur = Cursor { bytes };
    check_magic(LABEL_MAGIC, cur.header(1)?[0])?;
    let count = cur.header(2)?[1];
    Ok(cur.payload(8, count)?.to_vec())
}

pub fn load_mnist(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<MnistSet> {
    let (rows, cols, images) = read_idx_images(&fs::read(images_path)?)?;
    let labels = read_idx_labels(&fs::read(labels_path)?)?;
    MnistSet::new(rows, cols, images, labels)
}

pub fn write_idx_images(path: impl AsRef<Path>, rows: usize, cols: usize, images: &[Vec<u8>]) -> Result<()> {
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for word in [IMAGE_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&word.to_be_bytes());
    }
    for img in images {
        if img.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "image pixels",
                expected: rows * cols,
                found: img.len(),
            });
        }
        out.extend_from_slice(img);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    fs::write(path, out)?;
    Ok(())
}

/// First `limit` samples: pixels scaled to `[0, 1]`, labels one-hot over 10 classes.
pub fn mnist_to_pairs(set: &MnistSet, limit: usize) -> Result<Vec<SamplePair>> {
    if limit > set.len() {
        return Err(Error::InvalidParameter(format!(
            "limit {limit} exceeds the {} available samples",
            set.len()
        )));
    }
    Ok(set
        .images
        .iter()
        .zip(&set.labels)
        .take(limit)
        .enumerate()
        .map(|(i, (img, &label))| {
            let pixels: Vec<f64> = img.iter().map(|&p| f64::from(p) / 255.0).collect();
            let mut onehot = [0.0; 10];
            onehot[label as usize] = 1.0;
            SamplePair {
                input: ComplexVector::from_real(&pixels),
                target: ComplexVector::from_real(&onehot),
                tag: format!("digit{label}_{i}"),
            }
        })
        .collect())
}
