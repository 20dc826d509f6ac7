//! Operator files.
//!
//! Binary layout, all integers `u64` and floats `f64`, little-endian:
//!
//! | field | size |
//! |---|---|
//! | magic `SMPK1` | 5 bytes |
//! | `n_rows`, `n_cols`, `nnz` | 3 × 8 |
//! | flags (bit 0: symmetric) | 8 |
//! | `tau`, `est_rel_frobenius_error` | 2 × 8 |
//! | row offsets | (`n_rows` + 1) × 8 |
//! | column indices | `nnz` × 8 |
//! | values | `nnz` × 8 |

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use samplet_core::CompressedOperator;

use crate::error::{Error, Result};
use crate::io::{create, fmt_f64};

pub const MAGIC: &[u8; 5] = b"SMPK1";

pub fn write_operator<W: Write>(out: &mut W, op: &CompressedOperator) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    for v in [op.n_rows(), op.n_cols(), op.nnz(), usize::from(op.is_symmetric())] {
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    out.write_all(&op.tau().to_le_bytes())?;
    out.write_all(&op.est_rel_frobenius_error().to_le_bytes())?;
    for &v in op.row_ptr().iter().chain(op.col_idx()) {
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    for v in op.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_operator<R: Read>(input: &mut R) -> Result<CompressedOperator> {
    let mut magic = [0u8; 5];
    read_exact(input, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::OperatorFormat("bad magic bytes".into()));
    }
    let n_rows = read_len(input)?;
    let n_cols = read_len(input)?;
    let nnz = read_len(input)?;
    let flags = read_u64(input)?;
    let tau = read_f64(input)?;
    let err = read_f64(input)?;
    let row_ptr = (0..=n_rows).map(|_| read_len(input)).collect::<Result<Vec<_>>>()?;
    let col_idx = (0..nnz).map(|_| read_len(input)).collect::<Result<Vec<_>>>()?;
    let values = (0..nnz).map(|_| read_f64(input)).collect::<Result<Vec<_>>>()?;
    if input.read(&mut [0u8]).map_err(|e| Error::OperatorFormat(e.to_string()))? != 0 {
        return Err(Error::OperatorFormat("trailing bytes".into()));
    }
    CompressedOperator::from_csr(n_rows, n_cols, row_ptr, col_idx, values, tau, err, flags & 1 == 1)
        .map_err(|e| Error::OperatorFormat(e.to_string()))
}

pub fn save_operator(path: &Path, op: &CompressedOperator) -> Result<()> {
    let mut out = create(path)?;
    write_operator(&mut out, op).map_err(|e| Error::io(path, e))
}

pub fn load_operator(path: &Path) -> Result<CompressedOperator> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_operator(&mut BufReader::new(file))
}

/// Matrix Market coordinate format, 1-based, general storage.
pub fn write_matrix_market<W: Write>(out: &mut W, op: &CompressedOperator) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "% tau {} est_rel_frobenius_error {}", fmt_f64(op.tau()), fmt_f64(op.est_rel_frobenius_error()))?;
    writeln!(out, "{} {} {}", op.n_rows(), op.n_cols(), op.nnz())?;
    let rp = op.row_ptr();
    for r in 0..op.n_rows() {
        for k in rp[r]..rp[r + 1] {
            writeln!(out, "{} {} {}", r + 1, op.col_idx()[k] + 1, fmt_f64(op.values()[k]))?;
        }
    }
    out.flush()
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::OperatorFormat("truncated file".into()),
        _ => Error::OperatorFormat(e.to_string()),
    })
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(input, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_len<R: Read>(input: &mut R) -> Result<usize> {
    usize::try_from(read_u64(input)?).map_err(|_| Error::OperatorFormat("length overflows usize".into()))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(input, &mut b)?;
    Ok(f64::from_le_bytes(b))
}
