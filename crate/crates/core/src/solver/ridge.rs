use alloc::vec;
use alloc::vec::Vec;

use super::{count_nonzero, IterationRecord, Method, SolveReport, SolverConfig};
use crate::dense::{dot, norm2};
use crate::operator::LinearOperator;
use crate::{Error, Result};

/// Solves `(K + λI) β = h` by conjugate gradients, stopping at relative
/// residual `‖(K + λI)β − h‖₂ / ‖h‖₂ ≤ tol`.
///
/// `K` must be square and symmetric. With `diagonal_scaling` the iteration is
/// preconditioned by `diag(K) + λ`.
pub fn ridge_cg<O: LinearOperator + ?Sized>(op: &O, h: &[f64], config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let n = op.nrows();
    if op.ncols() != n {
        return Err(Error::InvalidParameter("ridge operator must be square".into()));
    }
    if h.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: h.len(),
        });
    }
    let lambda = config.lambda;
    let inv_diag: Option<Vec<f64>> = if config.diagonal_scaling {
        let mut d = vec![lambda; n];
        for (r, dr) in d.iter_mut().enumerate() {
            op.for_each_in_row(r, &mut |c, v| {
                if c == r {
                    *dr += v;
                }
            });
        }
        if d.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::RidgeBreakdown { iteration: 0, lambda });
        }
        Some(d.iter().map(|x| 1.0 / x).collect())
    } else {
        None
    };
    let precond = |r: &[f64], z: &mut [f64]| match &inv_diag {
        Some(d) => z.iter_mut().zip(r).zip(d).for_each(|((z, r), d)| *z = r * d),
        None => z.copy_from_slice(r),
    };

    let hn = norm2(h);
    let mut beta = vec![0.0; n];
    let mut log = Vec::new();
    if hn == 0.0 {
        return Ok(report(op, h, lambda, beta, 0, true, 0.0, log));
    }
    let mut r = h.to_vec();
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = 1.0;
    for it in 1..=config.max_iter {
        op.matvec_into(&p, &mut ap);
        ap.iter_mut().zip(&p).for_each(|(a, p)| *a += lambda * p);
        let curv = dot(&p, &ap);
        if !(curv > 0.0) {
            return Err(Error::RidgeBreakdown { iteration: it, lambda });
        }
        let step = rz / curv;
        for i in 0..n {
            beta[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        rel = norm2(&r) / hn;
        if !rel.is_finite() {
            return Err(Error::Divergence { iteration: it });
        }
        log.push(IterationRecord {
            outer: 0,
            iteration: it,
            mu: 1.0,
            gamma: 0.0,
            active_size: n,
            residual_inf: rel,
        });
        if rel <= config.tol {
            return Ok(report(op, h, lambda, beta, it, true, rel, log));
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let b = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + b * p[i];
        }
    }
    Ok(report(op, h, lambda, beta, config.max_iter, false, rel, log))
}

/// Reports the ridge objective `½‖h − Kβ‖² + (λ/2) βᵀKβ`.
#[allow(clippy::too_many_arguments)]
fn report<O: LinearOperator + ?Sized>(
    op: &O,
    h: &[f64],
    lambda: f64,
    beta: Vec<f64>,
    iterations: usize,
    converged: bool,
    rel: f64,
    log: Vec<IterationRecord>,
) -> SolveReport {
    let mut kb = vec![0.0; h.len()];
    op.matvec_into(&beta, &mut kb);
    let fit: f64 = h.iter().zip(&kb).map(|(a, b)| (a - b) * (a - b)).sum();
    let objective = 0.5 * fit + 0.5 * lambda * dot(&beta, &kb);
    SolveReport {
        method: Method::RidgeCg,
        final_active_size: count_nonzero(&beta),
        beta,
        alpha: None,
        iterations,
        converged,
        residual_inf: rel,
        objective,
        wall_time: None,
        block_nonzeros: Vec::new(),
        log,
    }
}
