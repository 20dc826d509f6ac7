//! Sparse operators in samplet coordinates.

mod compress;

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dense;
use crate::{Error, Result};

pub use compress::{compress, compress_capped};

/// Minimal interface the solvers need from a matrix.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `y = A x`.
    fn matvec_into(&self, x: &[f64], y: &mut [f64]);

    /// `y = Aᵀ x`.
    fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]);

    /// Calls `f(col, value)` for every stored entry of row `r`, columns
    /// ascending.
    fn for_each_in_row(&self, r: usize, f: &mut dyn FnMut(usize, f64));

    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check(self.ncols(), x.len())?;
        let mut y = vec![0.0; self.nrows()];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check(self.nrows(), x.len())?;
        let mut y = vec![0.0; self.ncols()];
        self.matvec_transpose_into(x, &mut y);
        Ok(y)
    }
}

fn check(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
struct Csr {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl Csr {
    fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let (c, v) = self.row(r);
            *yr = c.iter().zip(v).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    fn transposed(&self, ncols: usize) -> Csr {
        let mut counts = vec![0usize; ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..ncols {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.col_idx.len()];
        let mut values = vec![0.0; self.values.len()];
        for r in 0..self.row_ptr.len() - 1 {
            let (c, v) = self.row(r);
            for (&c, &v) in c.iter().zip(v) {
                col_idx[next[c]] = r;
                values[next[c]] = v;
                next[c] += 1;
            }
        }
        Csr {
            row_ptr: counts,
            col_idx,
            values,
        }
    }
}

/// Thresholded matrix in compressed-row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedOperator {
    n_rows: usize,
    n_cols: usize,
    csr: Csr,
    /// Rows of the transpose; `None` when the matrix is symmetric.
    transpose: Option<Csr>,
    tau: f64,
    est_rel_frobenius_error: f64,
}

impl CompressedOperator {
    /// Builds from raw CSR arrays. Column indices must be strictly increasing
    /// within each row.
    #[allow(clippy::too_many_arguments)]
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
        tau: f64,
        est_rel_frobenius_error: f64,
        symmetric: bool,
    ) -> Result<Self> {
        if row_ptr.len() != n_rows + 1 || row_ptr[0] != 0 {
            return Err(Error::InvalidParameter("malformed row offsets".into()));
        }
        if col_idx.len() != values.len() || row_ptr[n_rows] != values.len() {
            return Err(Error::InvalidParameter("row offsets do not match entry count".into()));
        }
        for r in 0..n_rows {
            if row_ptr[r] > row_ptr[r + 1] {
                return Err(Error::InvalidParameter("row offsets decrease".into()));
            }
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter("column indices not strictly increasing".into()));
            }
            if let Some(&c) = cols.last() {
                if c >= n_cols {
                    return Err(Error::IndexOutOfRange { index: c, len: n_cols });
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("operator value"));
        }
        if symmetric && n_rows != n_cols {
            return Err(Error::InvalidParameter("symmetric operator must be square".into()));
        }
        let csr = Csr {
            row_ptr,
            col_idx,
            values,
        };
        let transpose = if symmetric { None } else { Some(csr.transposed(n_cols)) };
        Ok(Self {
            n_rows,
            n_cols,
            csr,
            transpose,
            tau,
            est_rel_frobenius_error,
        })
    }

    /// Keeps every nonzero entry of `a` with `|a_ij| ≥ tau` plus the diagonal.
    pub fn from_dense(a: &DMatrix<f64>, tau: f64) -> Result<Self> {
        let (n, m) = a.shape();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let (mut full, mut dropped) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..m {
                let v = a[(i, j)];
                full += v * v;
                if (v != 0.0 && v.abs() >= tau) || i == j {
                    col_idx.push(j);
                    values.push(v);
                } else {
                    dropped += v * v;
                }
            }
            row_ptr.push(values.len());
        }
        let err = if full > 0.0 { libm::sqrt(dropped / full) } else { 0.0 };
        let symmetric = n == m && (0..n).all(|i| (0..i).all(|j| a[(i, j)] == a[(j, i)]));
        Self::from_csr(n, m, row_ptr, col_idx, values, tau, err, symmetric)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_csr(n, n, (0..=n).collect(), (0..n).collect(), vec![1.0; n], 0.0, 0.0, true)
            .expect("identity is well formed")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.csr.values.len()
    }

    /// Stored entries per row, counting the full (not triangular) storage.
    pub fn nnz_per_row_avg(&self) -> f64 {
        if self.n_rows == 0 {
            0.0
        } else {
            self.nnz() as f64 / self.n_rows as f64
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `‖dropped‖_F / ‖full‖_F` recorded when thresholding.
    pub fn est_rel_frobenius_error(&self) -> f64 {
        self.est_rel_frobenius_error
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose.is_none()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.csr.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.csr.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.csr.values
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_rows.min(self.n_cols)];
        for (r, dr) in d.iter_mut().enumerate() {
            let (c, v) = self.csr.row(r);
            if let Ok(k) = c.binary_search(&r) {
                *dr = v[k];
            }
        }
        d
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            let (c, v) = self.csr.row(r);
            for (&c, &v) in c.iter().zip(v) {
                a[(r, c)] = v;
            }
        }
        a
    }
}

impl LinearOperator for CompressedOperator {
    fn nrows(&self) -> usize {
        self.n_rows
    }

    fn ncols(&self) -> usize {
        self.n_cols
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        self.csr.mul(x, y);
    }

    fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        match &self.transpose {
            None => self.csr.mul(x, y),
            Some(t) => t.mul(x, y),
        }
    }

    fn for_each_in_row(&self, r: usize, f: &mut dyn FnMut(usize, f64)) {
        let (c, v) = self.csr.row(r);
        for (&c, &v) in c.iter().zip(v) {
            f(c, v);
        }
    }
}

/// Horizontal concatenation `[K₁, …, K_L]` acting on stacked coefficients.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    blocks: Vec<CompressedOperator>,
    offsets: Vec<usize>,
}

impl BlockOperator {
    pub fn new(blocks: Vec<CompressedOperator>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidParameter("block operator without blocks".into()))?;
        let n = first.n_rows();
        let mut offsets = vec![0];
        for b in &blocks {
            if b.n_rows() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: b.n_rows(),
                });
            }
            offsets.push(offsets.last().unwrap() + b.n_cols());
        }
        Ok(Self { blocks, offsets })
    }

    pub fn blocks(&self) -> &[CompressedOperator] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Column range of block `j` in the stacked coefficient vector.
    pub fn block_range(&self, j: usize) -> core::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }
}

impl LinearOperator for BlockOperator {
    fn nrows(&self) -> usize {
        self.blocks[0].n_rows()
    }

    fn ncols(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let mut tmp = vec![0.0; y.len()];
        y.fill(0.0);
        for (j, b) in self.blocks.iter().enumerate() {
            b.matvec_into(&x[self.block_range(j)], &mut tmp);
            for (a, t) in y.iter_mut().zip(&tmp) {
                *a += t;
            }
        }
    }

    fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        for (j, b) in self.blocks.iter().enumerate() {
            b.matvec_transpose_into(x, &mut y[self.block_range(j)]);
        }
    }

    fn for_each_in_row(&self, r: usize, f: &mut dyn FnMut(usize, f64)) {
        for (j, b) in self.blocks.iter().enumerate() {
            let off = self.offsets[j];
            b.for_each_in_row(r, &mut |c, v| f(off + c, v));
        }
    }
}

/// Dense Gram block `(opᵀ op)[A, B]`, accumulated row by row.
pub fn submatrix_gram<O: LinearOperator + ?Sized>(op: &O, rows: &[usize], cols: &[usize]) -> Result<DMatrix<f64>> {
    let n = op.ncols();
    let mut pos_a = vec![usize::MAX; n];
    let mut pos_b = vec![usize::MAX; n];
    for (set, pos) in [(rows, &mut pos_a), (cols, &mut pos_b)] {
        for (k, &i) in set.iter().enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            pos[i] = k;
        }
    }
    let mut g = DMatrix::zeros(rows.len(), cols.len());
    if rows.is_empty() || cols.is_empty() {
        return Ok(g);
    }
    let mut ea: Vec<(usize, f64)> = Vec::new();
    let mut eb: Vec<(usize, f64)> = Vec::new();
    for r in 0..op.nrows() {
        ea.clear();
        eb.clear();
        op.for_each_in_row(r, &mut |c, v| {
            if pos_a[c] != usize::MAX {
                ea.push((pos_a[c], v));
            }
            if pos_b[c] != usize::MAX {
                eb.push((pos_b[c], v));
            }
        });
        for &(j, vb) in &eb {
            let mut col = g.column_mut(j);
            for &(i, va) in &ea {
                col[i] += va * vb;
            }
        }
    }
    Ok(g)
}

/// `σ_max(op)²` by power iteration on `opᵀ op`, times a 1.01 safety factor.
pub fn estimate_lipschitz<O: LinearOperator + ?Sized>(op: &O) -> Result<f64> {
    let n = op.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a3b_1e7d);
    let mut x: Vec<f64> = (0..n)
        .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    let nx = dense::norm2(&x);
    if nx == 0.0 {
        return Err(Error::ZeroOperator);
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let mut ax = vec![0.0; op.nrows()];
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    for it in 0..100 {
        op.matvec_into(&x, &mut ax);
        op.matvec_transpose_into(&ax, &mut y);
        let ny = dense::norm2(&y);
        if ny == 0.0 || !ny.is_finite() {
            if it == 0 && ny == 0.0 {
                return Err(Error::ZeroOperator);
            }
            break;
        }
        let prev = lambda;
        lambda = ny;
        for (a, b) in x.iter_mut().zip(&y) {
            *a = b / ny;
        }
        if it > 0 && (lambda - prev).abs() <= 1e-4 * lambda {
            break;
        }
    }
    if lambda == 0.0 {
        return Err(Error::ZeroOperator);
    }
    Ok(1.01 * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, m: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, m, |_, _| (rng.next_u32() as f64 / u32::MAX as f64) - 0.5)
    }

    #[test]
    fn identity_matvec() {
        let op = CompressedOperator::identity(5);
        let v = [1.0, -2.0, 3.0, 0.5, 0.0];
        assert_eq!(op.matvec(&v).unwrap(), v.to_vec());
        assert_eq!(op.matvec_transpose(&v).unwrap(), v.to_vec());
        assert!(op.matvec(&[1.0]).is_err());
    }

    #[test]
    fn nonsymmetric_transpose_matches_dense() {
        let a = sample(7, 4, 3);
        let op = CompressedOperator::from_dense(&a, 0.0).unwrap();
        assert!(!op.is_symmetric());
        let x = [0.3, -1.0, 2.0, 0.1, 0.0, 1.0, -0.4];
        let y = op.matvec_transpose(&x).unwrap();
        let want = a.transpose() * nalgebra::DVector::from_column_slice(&x);
        for i in 0..4 {
            assert!((y[i] - want[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn threshold_keeps_diagonal() {
        let a = DMatrix::from_row_slice(2, 2, &[1e-9, 0.5, 0.5, 2.0]);
        let op = CompressedOperator::from_dense(&a, 1.0).unwrap();
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.diagonal(), vec![1e-9, 2.0]);
        let expect = libm::sqrt(0.5 / (1e-18 + 0.5 + 4.0));
        assert!((op.est_rel_frobenius_error() - expect).abs() < 1e-15);
    }

    #[test]
    fn malformed_csr_is_rejected() {
        assert!(CompressedOperator::from_csr(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0], 0.0, 0.0, false).is_err());
        assert!(CompressedOperator::from_csr(1, 2, vec![0, 1], vec![2], vec![1.0], 0.0, 0.0, false).is_err());
        assert!(CompressedOperator::from_csr(2, 2, vec![0, 1], vec![0], vec![1.0], 0.0, 0.0, true).is_err());
    }

    #[test]
    fn lipschitz_of_simple_operators() {
        let l = estimate_lipschitz(&CompressedOperator::identity(10)).unwrap();
        assert!((l - 1.01).abs() < 1e-3);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 1.0]));
        let l = estimate_lipschitz(&CompressedOperator::from_dense(&d, 0.0).unwrap()).unwrap();
        assert!((l / (9.0 * 1.01) - 1.0).abs() < 1e-3);
        let z = CompressedOperator::from_dense(&DMatrix::zeros(3, 3), 0.0).unwrap();
        assert!(matches!(estimate_lipschitz(&z), Err(Error::ZeroOperator)));
    }

    #[test]
    fn gram_edge_cases() {
        let op = CompressedOperator::identity(4);
        let g = submatrix_gram(&op, &[1, 2], &[1, 2]).unwrap();
        assert_eq!(g, DMatrix::identity(2, 2));
        assert_eq!(submatrix_gram(&op, &[], &[]).unwrap().shape(), (0, 0));
        assert!(matches!(
            submatrix_gram(&op, &[4], &[0]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn block_operator_row_entries_are_offset() {
        let a = CompressedOperator::identity(3);
        let b = CompressedOperator::from_dense(&(DMatrix::identity(3, 3) * 2.0), 0.0).unwrap();
        let blk = BlockOperator::new(vec![a, b]).unwrap();
        let mut seen = Vec::new();
        blk.for_each_in_row(1, &mut |c, v| seen.push((c, v)));
        assert_eq!(seen, vec![(1, 1.0), (4, 2.0)]);
        assert!(BlockOperator::new(vec![]).is_err());
        let c = CompressedOperator::identity(2);
        assert!(BlockOperator::new(vec![CompressedOperator::identity(3), c]).is_err());
    }
}
