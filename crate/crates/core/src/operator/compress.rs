//! Dense assembly, two-sided samplet transform and a-posteriori thresholding.

use alloc::vec::Vec;

use super::CompressedOperator;
use crate::geometry::PointCloud;
use crate::kernel::{assemble_rows, KernelSpec, DENSE_CAP};
use crate::samplet::SampletBasis;
use crate::{Error, Result};

/// `T K Tᵀ` with entries `|v| < tau` dropped (the diagonal is always kept).
///
/// The transformed matrix is symmetrized as `(B + Bᵀ)/2` before thresholding
/// so the stored pattern and values are exactly symmetric.
pub fn compress(basis: &SampletBasis, spec: &KernelSpec, cloud: &PointCloud, tau: f64) -> Result<CompressedOperator> {
    compress_capped(basis, spec, cloud, tau, DENSE_CAP)
}

pub fn compress_capped(
    basis: &SampletBasis,
    spec: &KernelSpec,
    cloud: &PointCloud,
    tau: f64,
    cap: usize,
) -> Result<CompressedOperator> {
    let n = basis.len();
    if cloud.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: cloud.len(),
        });
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::InvalidParameter("threshold must be nonnegative".into()));
    }
    let mut b = assemble_rows(spec, cloud, basis.tree().permutation(), cap)?;
    basis.rotate_rows_up(&mut b, n);
    transpose_square(&mut b, n);
    basis.rotate_rows_up(&mut b, n);

    let slot = |g: usize| basis.slot_of(g);
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    let (mut full, mut dropped) = (0.0, 0.0);
    for gi in 0..n {
        let si = slot(gi);
        for gj in 0..n {
            let sj = slot(gj);
            let v = 0.5 * (b[si * n + sj] + b[sj * n + si]);
            if !v.is_finite() {
                return Err(Error::NonFinite("transformed kernel value"));
            }
            full += v * v;
            if v.abs() >= tau || gi == gj {
                col_idx.push(gj);
                values.push(v);
            } else {
                dropped += v * v;
            }
        }
        row_ptr.push(values.len());
    }
    drop(b);
    let err = if full > 0.0 { libm::sqrt(dropped / full) } else { 0.0 };
    CompressedOperator::from_csr(n, n, row_ptr, col_idx, values, tau, err, true)
}

fn transpose_square(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            a.swap(i * n + j, j * n + i);
        }
    }
}
