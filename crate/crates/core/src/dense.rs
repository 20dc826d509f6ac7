//! Small dense kernels: Householder QR with a full orthogonal factor, GEMM on
//! strided row-major blocks and thin wrappers over nalgebra factorizations.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Full QR factorization `A = Q R` of an `n × m` column-major matrix.
///
/// `q` is `n × n` column-major and orthogonal, `r` is `n × m` column-major and
/// upper trapezoidal with a nonnegative diagonal.
#[derive(Debug, Clone)]
pub struct FullQr {
    pub n: usize,
    pub m: usize,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

pub fn householder_qr(a: &[f64], n: usize, m: usize) -> FullQr {
    assert_eq!(a.len(), n * m);
    let mut r = a.to_vec();
    let steps = m.min(n.saturating_sub(1));
    // reflectors stored as (unit vector v on rows j.., beta = 2)
    let mut reflectors: Vec<(usize, Vec<f64>)> = Vec::with_capacity(steps);
    for j in 0..steps {
        let col = &r[j * n..(j + 1) * n];
        let norm = libm::sqrt(col[j..].iter().map(|x| x * x).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = if col[j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col[j..].to_vec();
        v[0] -= alpha;
        let vnorm = libm::sqrt(v.iter().map(|x| x * x).sum());
        if vnorm == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        for c in j..m {
            let colc = &mut r[c * n..(c + 1) * n];
            let dot: f64 = v.iter().zip(&colc[j..]).map(|(a, b)| a * b).sum();
            for (x, vi) in colc[j..].iter_mut().zip(&v) {
                *x -= 2.0 * dot * vi;
            }
        }
        // clean the annihilated entries
        for i in j + 1..n {
            r[j * n + i] = 0.0;
        }
        reflectors.push((j, v));
    }

    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    for (j, v) in reflectors.iter().rev() {
        for c in 0..n {
            let colc = &mut q[c * n..(c + 1) * n];
            let dot: f64 = v.iter().zip(&colc[*j..]).map(|(a, b)| a * b).sum();
            if dot != 0.0 {
                for (x, vi) in colc[*j..].iter_mut().zip(v) {
                    *x -= 2.0 * dot * vi;
                }
            }
        }
    }

    // sign convention: nonnegative diagonal of R
    for j in 0..m.min(n) {
        if r[j * n + j] < 0.0 {
            for c in j..m {
                r[c * n + j] = -r[c * n + j];
            }
            for x in q[j * n..(j + 1) * n].iter_mut() {
                *x = -*x;
            }
        }
    }
    FullQr { n, m, q, r }
}

/// `C = A · B` with explicit row and column strides for every operand.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    c: &mut [f64],
    rsc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    if k > 0 {
        assert!(a.len() > (m - 1) * rsa + (k - 1) * csa);
        assert!(b.len() > (k - 1) * rsb + (n - 1) * csb);
    }
    assert!(c.len() >= (m - 1) * rsc + n);
    // SAFETY: the asserts cover the largest addressed offset of every operand.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            0.0,
            c.as_mut_ptr(),
            rsc as isize,
            1,
        );
    }
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky.
pub fn cholesky_solve(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let chol = a
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("Cholesky factorization failed"))?;
    let x = chol.solve(&nalgebra::DVector::from_column_slice(b));
    Ok(x.as_slice().to_vec())
}

/// Smallest eigenvalue of a symmetric matrix by a dense eigensolve.
pub fn smallest_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return f64::NAN;
    }
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue of a symmetric matrix by a dense eigensolve.
pub fn largest_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return f64::NAN;
    }
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
