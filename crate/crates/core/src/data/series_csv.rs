//! Plain-text time series. The first row is treated as a header of variable
//! names when any of its fields fails to parse as a number.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::format::csv_error;
use crate::error::{Error, Result};
use crate::spdness::SeriesMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeriesLayout {
    /// One line per variable, one column per step.
    VarsAsRows,
    /// One line per step, one column per variable.
    #[default]
    VarsAsCols,
}

impl fmt::Display for SeriesLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesLayout::VarsAsRows => "vars-as-rows",
            SeriesLayout::VarsAsCols => "vars-as-cols",
        })
    }
}

impl FromStr for SeriesLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vars-as-rows" => Ok(SeriesLayout::VarsAsRows),
            "vars-as-cols" => Ok(SeriesLayout::VarsAsCols),
            other => Err(Error::param("series_layout", format!("unknown layout `{other}`"))),
        }
    }
}

pub fn read_series_csv(path: &Path, layout: SeriesLayout) -> Result<SeriesMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let parsed: std::result::Result<Vec<f64>, _> =
            rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) => rows.push(values),
            Err(_) if line == 0 => continue,
            Err(_) => {
                return Err(Error::Csv {
                    path: path.to_path_buf(),
                    reason: format!("line {}: non-numeric field", line + 1),
                })
            }
        }
    }
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || width == 0 {
        return Err(Error::Empty);
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            reason: format!("data row {} has {} fields, expected {width}", bad + 1, rows[bad].len()),
        });
    }
    let height = rows.len();
    let values = match layout {
        SeriesLayout::VarsAsRows => DMatrix::from_fn(height, width, |p, k| rows[p][k]),
        SeriesLayout::VarsAsCols => DMatrix::from_fn(width, height, |p, k| rows[k][p]),
    };
    SeriesMatrix::new(values)
}

/// Writes a headerless CSV in the given layout.
pub fn write_series_csv(path: &Path, x: &SeriesMatrix, layout: SeriesLayout) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let v = x.values();
    let (outer, inner) = match layout {
        SeriesLayout::VarsAsRows => (v.nrows(), v.ncols()),
        SeriesLayout::VarsAsCols => (v.ncols(), v.nrows()),
    };
    for a in 0..outer {
        let record = (0..inner).map(|b| {
            let value = match layout {
                SeriesLayout::VarsAsRows => v[(a, b)],
                SeriesLayout::VarsAsCols => v[(b, a)],
            };
            format!("{value}")
        });
        w.write_record(record).map_err(|e| csv_error(path, e))?;
    }
    w.flush()?;
    Ok(())
}
