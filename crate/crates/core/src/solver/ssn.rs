use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_problem, count_nonzero, objective, shrink, Gamma, IterationRecord, Method, SolveReport, SolverConfig};
use crate::dense::{self, norm_inf};
use crate::operator::{estimate_lipschitz, submatrix_gram, LinearOperator};
use crate::{Error, Result};

/// Step parameter carried across Newton iterations and continuation steps.
struct GammaState {
    value: f64,
    auto: bool,
    /// Active set size at the last estimate.
    last: Option<usize>,
}

struct NewtonOutcome {
    beta: Vec<f64>,
    iterations: usize,
    converged: bool,
    residual_inf: f64,
}

/// Semi-smooth Newton method on `F(β) = β − SS_{γw}(β + γKᵀ(h − Kβ)) = 0`.
///
/// The active set is `{k : |u_k| > γ w_k}`; inactive coordinates are set to
/// zero and the active block solves `γ M_AA δ_A = γ M_AI r_I − r_A` with
/// `M = KᵀK`. Stops at `‖r‖∞ < config.tol`; reaching `config.max_newton`
/// steps returns an unconverged report.
pub fn mrssn<O: LinearOperator + ?Sized>(
    op: &O,
    h: &[f64],
    w: &[f64],
    beta0: &[f64],
    gamma: f64,
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    check_problem(op, h, w, beta0)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter("gamma must be positive".into()));
    }
    let mut state = GammaState {
        value: gamma,
        auto: false,
        last: None,
    };
    let mut log = Vec::new();
    let out = newton(op, h, w, beta0.to_vec(), &mut state, config, 0, 1.0, &mut log)?;
    finish(op, h, w, out, Method::Mrssn, log)
}

/// Iteratively regularized MRSSN: solves with weights `μ w` for
/// `μ = μ₀^k, k = outer_steps, …, 0`, warm starting each solve from the last.
pub fn ir_mrssn<O: LinearOperator + ?Sized>(
    op: &O,
    h: &[f64],
    w: &[f64],
    beta0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    check_problem(op, h, w, beta0)?;
    let mut state = match config.gamma {
        Gamma::Fixed(g) => GammaState {
            value: g,
            auto: false,
            last: None,
        },
        Gamma::Auto => GammaState {
            value: 1.0 / estimate_lipschitz(op)?,
            auto: true,
            last: None,
        },
    };
    let mut beta = beta0.to_vec();
    let mut log = Vec::new();
    let mut total = 0;
    let mut last = None;
    let mut scaled = vec![0.0; w.len()];
    for k in (0..=config.outer_steps).rev() {
        let step = config.outer_steps - k;
        let mu = libm::pow(config.mu0, k as f64);
        scaled.iter_mut().zip(w).for_each(|(s, w)| *s = mu * w);
        let out = newton(op, h, &scaled, beta, &mut state, config, step, mu, &mut log).map_err(|e| Error::OuterStep {
            step,
            mu,
            source: Box::new(e),
        })?;
        total += out.iterations;
        beta = out.beta.clone();
        last = Some(out);
    }
    let mut out = last.expect("at least one continuation step");
    out.iterations = total;
    finish(op, h, w, out, Method::IrMrssn, log)
}

fn finish<O: LinearOperator + ?Sized>(
    op: &O,
    h: &[f64],
    w: &[f64],
    out: NewtonOutcome,
    method: Method,
    log: Vec<IterationRecord>,
) -> Result<SolveReport> {
    let obj = objective(op, h, w, &out.beta)?;
    Ok(SolveReport {
        method,
        final_active_size: count_nonzero(&out.beta),
        beta: out.beta,
        alpha: None,
        iterations: out.iterations,
        converged: out.converged,
        residual_inf: out.residual_inf,
        objective: obj,
        wall_time: None,
        block_nonzeros: Vec::new(),
        log,
    })
}

#[allow(clippy::too_many_arguments)]
fn newton<O: LinearOperator + ?Sized>(
    op: &O,
    h: &[f64],
    w: &[f64],
    mut beta: Vec<f64>,
    gamma: &mut GammaState,
    config: &SolverConfig,
    outer: usize,
    mu: f64,
    log: &mut Vec<IterationRecord>,
) -> Result<NewtonOutcome> {
    let n = op.ncols();
    let mut kb = vec![0.0; op.nrows()];
    let mut g = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut iterations = 0;
    loop {
        let gm = gamma.value;
        op.matvec_into(&beta, &mut kb);
        kb.iter_mut().zip(h).for_each(|(k, h)| *k = h - *k);
        op.matvec_transpose_into(&kb, &mut g);
        for k in 0..n {
            u[k] = beta[k] + gm * g[k];
            r[k] = beta[k] - shrink(u[k], gm * w[k]);
        }
        let res = norm_inf(&r);
        if !res.is_finite() {
            return Err(Error::Divergence { iteration: iterations });
        }
        let active: Vec<usize> = (0..n).filter(|&k| u[k].abs() > gm * w[k]).collect();
        log.push(IterationRecord {
            outer,
            iteration: iterations,
            mu,
            gamma: gm,
            active_size: active.len(),
            residual_inf: res,
        });
        if res < config.tol {
            return Ok(NewtonOutcome {
                beta,
                iterations,
                converged: true,
                residual_inf: res,
            });
        }
        if iterations >= config.max_newton {
            return Ok(NewtonOutcome {
                beta,
                iterations,
                converged: false,
                residual_inf: res,
            });
        }
        if active.len() > config.active_cap {
            return Err(Error::ActiveSetTooLarge {
                size: active.len(),
                cap: config.active_cap,
            });
        }
        iterations += 1;

        // δ_I = −r_I
        let mut is_active = vec![false; n];
        for &k in &active {
            is_active[k] = true;
        }
        let r_inactive: Vec<f64> = (0..n).map(|k| if is_active[k] { 0.0 } else { r[k] }).collect();
        if !active.is_empty() {
            // M_AI r_I = I_A Kᵀ K (I_I r)
            let mut kr = vec![0.0; op.nrows()];
            op.matvec_into(&r_inactive, &mut kr);
            let mut mr = vec![0.0; n];
            op.matvec_transpose_into(&kr, &mut mr);
            let m_aa = submatrix_gram(op, &active, &active)?;
            let rhs: Vec<f64> = active.iter().map(|&k| mr[k] - r[k] / gm).collect();
            let delta = dense::cholesky_solve(m_aa.clone(), &rhs).map_err(|_| Error::SingularActiveSystem {
                active: active.len(),
            })?;
            if delta.iter().any(|d| !d.is_finite()) {
                return Err(Error::SingularActiveSystem { active: active.len() });
            }
            for (&k, d) in active.iter().zip(&delta) {
                beta[k] += d;
            }
            if gamma.auto {
                let size = active.len();
                let moved = match gamma.last {
                    None => true,
                    Some(prev) => size.abs_diff(prev) >= 2,
                };
                if moved {
                    let lmin = dense::smallest_eigenvalue(&m_aa);
                    if lmin > 0.0 && lmin.is_finite() {
                        gamma.value = lmin;
                    }
                    gamma.last = Some(size);
                }
            }
        }
        for k in 0..n {
            if !is_active[k] {
                beta[k] = 0.0;
            }
        }
    }
}
