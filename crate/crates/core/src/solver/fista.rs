use alloc::vec;
use alloc::vec::Vec;

use super::{apply_blocks, check_problem, count_nonzero, objective, shrink, IterationRecord, Method, SolveReport, SolverConfig};
use crate::operator::{estimate_lipschitz, LinearOperator};
use crate::samplet::SampletBasis;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub enum FistaMode<'a> {
    /// Shrinkage on samplet coefficients directly.
    Multiresolution,
    /// Shrinkage on single-scale coefficients `α`; the gradient step is taken
    /// in samplet coordinates `η = Tα`. One basis per stacked block.
    SingleScale(&'a [&'a SampletBasis]),
}

/// FISTA with step `δ = 1/L`, `L` from [`estimate_lipschitz`].
///
/// Stops when the gradient map `‖(η − α_k)/δ‖∞` drops below `config.tol` or
/// after `config.max_iter` steps. In single-scale mode `w` and the iterate
/// live in single-scale coordinates and `beta0` is read as `α₀`.
pub fn fista<O: LinearOperator + ?Sized>(
    op: &O,
    mode: FistaMode<'_>,
    h: &[f64],
    w: &[f64],
    beta0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    check_problem(op, h, w, beta0)?;
    let lipschitz = estimate_lipschitz(op)?;
    let delta = 1.0 / lipschitz;
    let n = op.ncols();
    let to_samplet = |v: &[f64]| -> Result<Vec<f64>> {
        match mode {
            FistaMode::Multiresolution => Ok(v.to_vec()),
            FistaMode::SingleScale(b) => apply_blocks(b, v, true),
        }
    };
    let to_single = |v: &[f64]| -> Result<Vec<f64>> {
        match mode {
            FistaMode::Multiresolution => Ok(v.to_vec()),
            FistaMode::SingleScale(b) => apply_blocks(b, v, false),
        }
    };
    let dw: Vec<f64> = w.iter().map(|x| delta * x).collect();

    let mut alpha_prev = beta0.to_vec();
    let mut t = 1.0;
    let mut eta = to_samplet(beta0)?;
    let mut ke = vec![0.0; op.nrows()];
    let mut grad = vec![0.0; n];
    let mut log = Vec::new();
    let mut alpha = alpha_prev.clone();
    let mut gmap = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=config.max_iter {
        iterations = it;
        op.matvec_into(&eta, &mut ke);
        ke.iter_mut().zip(h).for_each(|(k, h)| *k -= h);
        op.matvec_transpose_into(&ke, &mut grad);
        let step: Vec<f64> = eta.iter().zip(&grad).map(|(e, g)| e - delta * g).collect();
        // gradient map is measured in the shrinkage coordinates
        let (point, step) = match mode {
            FistaMode::Multiresolution => (eta.clone(), step),
            FistaMode::SingleScale(_) => (to_single(&eta)?, to_single(&step)?),
        };
        for k in 0..n {
            alpha[k] = shrink(step[k], dw[k]);
        }
        gmap = point.iter().zip(&alpha).fold(0.0, |m, (p, a)| f64::max(m, (p - a).abs())) / delta;
        if !gmap.is_finite() {
            return Err(Error::Divergence { iteration: it });
        }
        log.push(IterationRecord {
            outer: 0,
            iteration: it,
            mu: 1.0,
            gamma: delta,
            active_size: count_nonzero(&alpha),
            residual_inf: gmap,
        });
        if gmap < config.tol {
            converged = true;
            break;
        }
        let t_next = 0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * t * t));
        let c = (t - 1.0) / t_next;
        let gamma: Vec<f64> = alpha.iter().zip(&alpha_prev).map(|(a, p)| a + c * (a - p)).collect();
        eta = to_samplet(&gamma)?;
        t = t_next;
        alpha_prev.copy_from_slice(&alpha);
    }

    let (beta, alpha_out, method) = match mode {
        FistaMode::Multiresolution => (alpha, None, Method::MrFista),
        FistaMode::SingleScale(_) => (to_samplet(&alpha)?, Some(alpha), Method::Fista),
    };
    let obj = match &alpha_out {
        None => objective(op, h, w, &beta)?,
        Some(a) => {
            let l1: f64 = w.iter().zip(a).map(|(w, a)| w * a.abs()).sum();
            objective(op, h, &vec![0.0; n], &beta)? + l1
        }
    };
    let active = count_nonzero(alpha_out.as_deref().unwrap_or(&beta));
    Ok(SolveReport {
        method,
        beta,
        alpha: alpha_out,
        iterations,
        converged,
        final_active_size: active,
        residual_inf: gmap,
        objective: obj,
        wall_time: None,
        block_nonzeros: Vec::new(),
        log,
    })
}
