//! CSV and JSON artifacts.
//!
//! Matrices are written row-major with a header row of column labels and a
//! leading label column. Complex matrices become two files, `<stem>.csv`
//! with real parts and `<stem>_imag.csv` with imaginary parts. Every data
//! file gets a `<stem>.meta.json` sidecar. Floats use the shortest text that
//! parses back to the same value.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fock::ObservableSeries;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Parse {
            line: 0,
            column: 0,
            message: format!("{}: {other:?}", path.display()),
        },
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    Ok(())
}

fn write_rows(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Real matrix with labelled rows and columns.
pub fn write_matrix_csv(path: &Path, labels: &[String], m: &DMatrix<f64>) -> Result<()> {
    if labels.len() != m.nrows() || m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: m.nrows(),
        });
    }
    let mut header = vec!["mode".to_string()];
    header.extend(labels.iter().cloned());
    let rows = (0..m.nrows()).map(|i| {
        let mut r = vec![labels[i].clone()];
        r.extend((0..m.ncols()).map(|j| fmt_f64(m[(i, j)])));
        r
    });
    write_rows(path, &header, rows)
}

/// `<stem>.csv` and `<stem>_imag.csv`. Returns both paths.
pub fn write_complex_matrix_csv(dir: &Path, stem: &str, labels: &[String], m: &DMatrix<Complex64>) -> Result<[PathBuf; 2]> {
    let re = dir.join(format!("{stem}.csv"));
    let im = dir.join(format!("{stem}_imag.csv"));
    write_matrix_csv(&re, labels, &m.map(|c| c.re))?;
    write_matrix_csv(&im, labels, &m.map(|c| c.im))?;
    Ok([re, im])
}

pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let labels: Vec<String> = r.headers().map_err(|e| csv_error(path, e))?.iter().skip(1).map(str::to_string).collect();
    let n = labels.len();
    let mut data = Vec::with_capacity(n * n);
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        for (j, field) in rec.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line: i + 2,
                column: j + 2,
                message: format!("not a number: {field:?}"),
            })?;
            data.push(v);
        }
    }
    if data.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: data.len(),
        });
    }
    Ok((labels, DMatrix::from_row_slice(n, n, &data)))
}

/// Columns `tau,label,value`, one row per time and observable.
pub fn write_series_csv(path: &Path, series: &ObservableSeries) -> Result<()> {
    let header = ["tau".to_string(), "label".to_string(), "value".to_string()];
    let rows = series.rows().into_iter().map(|(t, l, v)| vec![fmt_f64(t), l, fmt_f64(v)]);
    write_rows(path, &header, rows)
}

/// Generic table; every row must match the header length.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| r.len() != header.len()) {
        return Err(Error::DimensionMismatch {
            expected: header.len(),
            found: bad.len(),
        });
    }
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_rows(path, &header, rows.iter().cloned())
}

/// Sidecar path for a data file: `dir/name.csv` -> `dir/name.meta.json`.
pub fn meta_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    data.with_file_name(format!("{stem}.meta.json"))
}

/// Writes pretty JSON with sorted keys.
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_meta(data: &Path, meta: &Map<String, Value>) -> Result<()> {
    write_json(&meta_path(data), &Value::Object(meta.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -3.9159807e-12, 1.0, 1e300, 2.0f64.sqrt(), -0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn matrix_round_trip_with_labels() {
        let dir = tempfile::tempdir().unwrap();
        let m = DMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 / 3.0, -(j as f64) * 1e-9));
        let labels: Vec<String> = ["l0p0", "l0p1", "l0p2"].iter().map(|s| s.to_string()).collect();
        let [re, im] = write_complex_matrix_csv(dir.path(), "theta", &labels, &m).unwrap();
        let (l, a) = read_matrix_csv(&re).unwrap();
        let (_, b) = read_matrix_csv(&im).unwrap();
        assert_eq!(l, labels);
        assert_eq!(a, m.map(|c| c.re));
        assert_eq!(b, m.map(|c| c.im));
        let text = fs::read_to_string(&re).unwrap();
        assert!(text.starts_with("mode,l0p0,l0p1,l0p2\nl0p0,"));
    }

    #[test]
    fn sidecar_naming_and_hash() {
        assert_eq!(meta_path(Path::new("out/V_mk.csv")), PathBuf::from("out/V_mk.meta.json"));
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
