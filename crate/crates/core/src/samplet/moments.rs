//! Polynomial moments about a cluster's box midpoint.
//!
//! Coordinates are shifted to the midpoint and divided by the box half-widths
//! before powering, so moments stay `O(1)` for any degree. Vanishing moments
//! are invariant under this affine change.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::BoundingBox;

/// `C(q + d, d)`, the dimension of polynomials of total degree `≤ q` in `d`
/// variables.
pub fn moment_dim(dim: usize, q: usize) -> usize {
    let mut c: usize = 1;
    for i in 1..=dim {
        c = c * (q + i) / i;
    }
    c
}

/// Multi-indices `α` with `|α| ≤ q` in graded lexicographic order.
pub fn multi_indices(dim: usize, q: usize) -> Vec<Vec<usize>> {
    fn fill(prefix: &mut Vec<usize>, dim: usize, rem: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == dim {
            prefix.push(rem);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=rem).rev() {
            prefix.push(a);
            fill(prefix, dim, rem - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(moment_dim(dim, q));
    for deg in 0..=q {
        fill(&mut Vec::with_capacity(dim), dim, deg, &mut out);
    }
    out
}

/// Local frame of a cluster: midpoint and per-axis scale.
#[derive(Debug, Clone)]
pub(crate) struct Frame {
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Frame {
    pub fn of(bbox: &BoundingBox) -> Self {
        let center = bbox.midpoint();
        let half: Vec<f64> = bbox.widths().map(|w| 0.5 * w).collect();
        let hmax = half.iter().copied().fold(0.0, f64::max);
        let fallback = if hmax > 0.0 { hmax } else { 1.0 };
        let scale = half
            .iter()
            .map(|&h| if h > 1e-12 * fallback { h } else { fallback })
            .collect();
        Self { center, scale }
    }
}

/// Evaluates all monomials of a frame at the given points.
///
/// Output is the transposed moment matrix, column-major `n × m`: entry
/// `(i, α)` at `α * n + i`.
pub(crate) fn moment_matrix_t<'a>(
    frame: &Frame,
    indices: &[Vec<usize>],
    q: usize,
    points: impl ExactSizeIterator<Item = &'a [f64]>,
) -> Vec<f64> {
    let n = points.len();
    let m = indices.len();
    let dim = frame.center.len();
    let mut mt = vec![0.0; n * m];
    let mut pow = vec![0.0; dim * (q + 1)];
    for (i, p) in points.enumerate() {
        for k in 0..dim {
            let y = (p[k] - frame.center[k]) / frame.scale[k];
            let row = &mut pow[k * (q + 1)..(k + 1) * (q + 1)];
            row[0] = 1.0;
            for e in 1..=q {
                row[e] = row[e - 1] * y;
            }
        }
        for (a, alpha) in indices.iter().enumerate() {
            let mut v = 1.0;
            for (k, &e) in alpha.iter().enumerate() {
                v *= pow[k * (q + 1) + e];
            }
            mt[a * n + i] = v;
        }
    }
    mt
}

/// Change of polynomial basis from a child frame to its parent frame.
///
/// Row-major `m × m`: moments in the parent frame are `S · moments_child`.
pub(crate) fn shift_matrix(child: &Frame, parent: &Frame, indices: &[Vec<usize>], q: usize) -> Vec<f64> {
    let m = indices.len();
    let dim = child.center.len();
    // parent coordinate y_p = a * y_c + b per axis
    let a: Vec<f64> = (0..dim).map(|k| child.scale[k] / parent.scale[k]).collect();
    let b: Vec<f64> = (0..dim)
        .map(|k| (child.center[k] - parent.center[k]) / parent.scale[k])
        .collect();
    let binom = binomials(q);
    let ipow = |x: f64, e: usize| -> f64 {
        let mut r = 1.0;
        for _ in 0..e {
            r *= x;
        }
        r
    };
    let mut s = vec![0.0; m * m];
    for (ia, alpha) in indices.iter().enumerate() {
        for (ib, beta) in indices.iter().enumerate() {
            let mut v = 1.0;
            for k in 0..dim {
                if beta[k] > alpha[k] {
                    v = 0.0;
                    break;
                }
                v *= binom[alpha[k]][beta[k]] * ipow(a[k], beta[k]) * ipow(b[k], alpha[k] - beta[k]);
            }
            s[ia * m + ib] = v;
        }
    }
    s
}

fn binomials(q: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; q + 1]; q + 1];
    for n in 0..=q {
        t[n][0] = 1.0;
        for k in 1..=n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0.0 };
        }
    }
    t
}
