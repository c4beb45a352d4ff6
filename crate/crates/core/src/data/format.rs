//! SPDB matrix container and its label sidecar.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SPDB"
//! 4       2     version (u16, = 1)
//! 6       4     dim n (u32)
//! 10      4     count (u32)
//! 14      4     flags (u32): bit0 correlation matrices, bit1 classification task
//! 18      ...   count * n * n f64 values, row-major
//! ```
//!
//! All integers and floats are little-endian. Labels live next to the
//! container in `<stem>.labels.csv` with header `id,label`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::dataset::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

pub const MAGIC: [u8; 4] = *b"SPDB";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: u64 = 18;

pub const FLAG_CORRELATION: u32 = 1;
pub const FLAG_CLASSIFICATION: u32 = 1 << 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixFileHeader {
    pub dim: u32,
    pub count: u32,
    pub flags: u32,
}

impl MatrixFileHeader {
    pub fn payload_len(&self) -> u64 {
        self.count as u64 * self.dim as u64 * self.dim as u64 * 8
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN as usize] {
        let mut out = [0u8; HEADER_LEN as usize];
        out[0..4].copy_from_slice(&MAGIC);
        out[4..6].copy_from_slice(&VERSION.to_le_bytes());
        out[6..10].copy_from_slice(&self.dim.to_le_bytes());
        out[10..14].copy_from_slice(&self.count.to_le_bytes());
        out[14..18].copy_from_slice(&self.flags.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8; HEADER_LEN as usize]) -> Result<Self> {
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic { found: magic });
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: VERSION,
            });
        }
        Ok(Self {
            dim: u32::from_le_bytes(bytes[6..10].try_into().unwrap()),
            count: u32::from_le_bytes(bytes[10..14].try_into().unwrap()),
            flags: u32::from_le_bytes(bytes[14..18].try_into().unwrap()),
        })
    }
}

/// `dir/name.spdb` -> `dir/name.labels.csv`.
pub fn labels_path(path: &Path) -> PathBuf {
    sidecar_path(path, "labels")
}

/// `dir/name.spdb` -> `dir/name.<suffix>.csv`.
pub fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

pub fn write_matrices(path: &Path, dataset: &LabeledDataset) -> Result<()> {
    let count = u32::try_from(dataset.len())
        .map_err(|_| Error::param("count", "too many matrices for the format"))?;
    let dim = dataset.dim().unwrap_or(0) as u32;
    let mut flags = 0;
    if dataset.is_correlation() {
        flags |= FLAG_CORRELATION;
    }
    if dataset.task() == Task::Classification {
        flags |= FLAG_CLASSIFICATION;
    }
    let header = MatrixFileHeader { dim, count, flags };

    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&header.to_bytes())?;
    for m in dataset.matrices() {
        let a = m.matrix();
        for p in 0..a.nrows() {
            for q in 0..a.ncols() {
                w.write_all(&a[(p, q)].to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    write_labels(&labels_path(path), dataset.ids(), dataset.labels())
}

pub fn read_header(path: &Path) -> Result<MatrixFileHeader> {
    let mut f = File::open(path)?;
    read_header_from(&mut f, path)
}

fn read_header_from(f: &mut File, path: &Path) -> Result<MatrixFileHeader> {
    let len = f.metadata()?.len();
    if len < HEADER_LEN {
        return Err(Error::TruncatedPayload {
            expected: HEADER_LEN,
            found: len,
        });
    }
    let mut buf = [0u8; HEADER_LEN as usize];
    f.read_exact(&mut buf)?;
    let header = MatrixFileHeader::parse(&buf)?;
    let expected = HEADER_LEN + header.payload_len();
    if len < expected {
        return Err(Error::TruncatedPayload {
            expected: header.payload_len(),
            found: len - HEADER_LEN,
        });
    }
    if len > expected {
        return Err(Error::TrailingBytes {
            extra: len - expected,
        });
    }
    if header.count > 0 && header.dim == 0 {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            reason: "nonzero count with zero dimension".into(),
        });
    }
    Ok(header)
}

pub fn read_matrices(path: &Path) -> Result<LabeledDataset> {
    let mut f = File::open(path)?;
    let header = read_header_from(&mut f, path)?;
    let n = header.dim as usize;
    let mut r = BufReader::new(f);
    let mut matrices = Vec::with_capacity(header.count as usize);
    let mut row = vec![0u8; n * 8];
    for _ in 0..header.count {
        let mut values = Vec::with_capacity(n * n);
        for _ in 0..n {
            r.read_exact(&mut row)?;
            values.extend(
                row.chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap())),
            );
        }
        matrices.push(SymmetricMatrix::new(DMatrix::from_row_slice(n, n, &values))?);
    }
    let (ids, labels) = read_labels(&labels_path(path))?;
    if labels.len() != matrices.len() {
        return Err(Error::LabelCountMismatch {
            matrices: matrices.len(),
            labels: labels.len(),
        });
    }
    let task = if header.flags & FLAG_CLASSIFICATION != 0 {
        Task::Classification
    } else {
        Task::Regression
    };
    LabeledDataset::with_ids(
        matrices,
        labels,
        ids,
        task,
        header.flags & FLAG_CORRELATION != 0,
    )
}

pub fn write_labels(path: &Path, ids: &[u64], labels: &[f64]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    w.write_record(["id", "label"]).map_err(|e| csv_error(path, e))?;
    for (id, y) in ids.iter().zip(labels) {
        // `{}` on f64 prints the shortest string that parses back to the same bits
        w.write_record([id.to_string(), format!("{y}")])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_labels(path: &Path) -> Result<(Vec<u64>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "label" {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            reason: format!("expected header `id,label`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let bad = |what: &str| Error::Csv {
            path: path.to_path_buf(),
            reason: format!("row {}: invalid {what}", line + 1),
        };
        ids.push(rec[0].trim().parse::<u64>().map_err(|_| bad("id"))?);
        labels.push(rec[1].trim().parse::<f64>().map_err(|_| bad("label"))?);
    }
    Ok((ids, labels))
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Csv {
            path: path.to_path_buf(),
            reason: e.to_string(),
        }
    }
}
