//! Labeled point CSV files and coefficient tables.
//!
//! A labeled file has one row per point, `x1,…,xd,value`, an optional
//! header row and `.` as decimal separator.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use samplet_core::PointCloud;

use crate::error::{Error, Result};

/// Points and one value per point, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledData {
    pub cloud: PointCloud,
    pub values: Vec<f64>,
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_labeled_csv(path: &Path) -> Result<LabeledData> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_labeled_csv(file)
}

/// Parses a labeled table; the last column is the value.
pub fn parse_labeled_csv<R: Read>(reader: R) -> Result<LabeledData> {
    let rows = parse_table(reader)?;
    let width = rows[0].len();
    if width < 2 {
        return Err(Error::RaggedRow {
            row: 1,
            expected: 2,
            found: width,
        });
    }
    let dim = width - 1;
    let mut coords = Vec::with_capacity(rows.len() * dim);
    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        coords.extend_from_slice(&row[..dim]);
        values.push(row[dim]);
    }
    Ok(LabeledData {
        cloud: PointCloud::new(dim, coords)?,
        values,
    })
}

/// Parses a numeric table with a consistent column count. A first row that
/// does not parse as numbers is taken as a header.
pub fn parse_table<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, usize> = record
            .iter()
            .enumerate()
            .map(|(j, c)| c.parse::<f64>().map_err(|_| j))
            .collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if rows.is_empty() && width.is_none() => {
                width = Some(record.len());
                continue;
            }
            Err(j) => {
                return Err(Error::BadCell {
                    row: line,
                    column: j + 1,
                    text: record[j].to_string(),
                })
            }
        };
        let expected = *width.get_or_insert(row.len());
        if row.len() != expected {
            return Err(Error::RaggedRow {
                row: line,
                expected,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::NoData);
    }
    Ok(rows)
}

/// Reads a single-column vector; for wider tables the last column is used.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_table(file)?.into_iter().map(|r| r[r.len() - 1]).collect())
}

pub fn write_labeled_csv(path: &Path, cloud: &PointCloud, values: &[f64]) -> Result<()> {
    let mut out = create(path)?;
    write_labeled(&mut out, cloud, values).map_err(|e| Error::io(path, e))
}

pub fn write_labeled<W: Write>(out: &mut W, cloud: &PointCloud, values: &[f64]) -> std::io::Result<()> {
    let header: Vec<String> = (1..=cloud.dim()).map(|k| format!("x{k}")).collect();
    writeln!(out, "{},value", header.join(","))?;
    for (p, v) in cloud.points().zip(values) {
        for x in p {
            write!(out, "{},", fmt_f64(*x))?;
        }
        writeln!(out, "{}", fmt_f64(*v))?;
    }
    out.flush()
}

/// `index,beta,alpha` rows; `block` is prepended for stacked dictionaries.
pub fn write_coefficients(path: &Path, beta: &[f64], alpha: &[f64], blocks: usize) -> Result<()> {
    let mut out = create(path)?;
    let n = beta.len() / blocks.max(1);
    let res = (|| {
        if blocks > 1 {
            writeln!(out, "block,index,beta,alpha")?;
        } else {
            writeln!(out, "index,beta,alpha")?;
        }
        for (k, (b, a)) in beta.iter().zip(alpha).enumerate() {
            if blocks > 1 {
                write!(out, "{},{},", k / n, k % n)?;
            } else {
                write!(out, "{k},")?;
            }
            writeln!(out, "{},{}", fmt_f64(*b), fmt_f64(*a))?;
        }
        out.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

/// Reads the `alpha` column of a coefficient table, stacked over blocks.
pub fn read_alpha(path: &Path) -> Result<Vec<f64>> {
    read_vector(path)
}

/// `index,value` rows.
pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    let mut out = create(path)?;
    let res = (|| {
        writeln!(out, "index,value")?;
        for (k, x) in v.iter().enumerate() {
            writeln!(out, "{k},{}", fmt_f64(*x))?;
        }
        out.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}
