//! Ridge regression, FISTA and semi-smooth Newton solvers in samplet
//! coordinates.
//!
//! The ℓ¹ problems are
//! `min_β ½‖h − Kβ‖₂² + Σ w_k |β_k|` (multiresolution) and the same problem
//! in single-scale coefficients `α = Tᵀβ`.

mod fista;
mod multi;
mod ridge;
mod ssn;

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::dense;
use crate::operator::LinearOperator;
use crate::samplet::SampletBasis;
use crate::{Error, Result};

pub use fista::{fista, FistaMode};
pub use multi::solve_multi_kernel;
pub use ridge::ridge_cg;
pub use ssn::{ir_mrssn, mrssn};

/// Step parameter for the Newton methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Fixed(f64),
    /// Starts at `1/L` and is reset to `λ_min(M_AA)` whenever the active set
    /// size has moved by at least 2 since the last estimate.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// ∞-norm stopping tolerance.
    pub tol: f64,
    /// Iteration cap for FISTA and CG.
    pub max_iter: usize,
    /// Newton step cap per MRSSN call.
    pub max_newton: usize,
    /// Ridge parameter `λ` (not divided by `N`).
    pub lambda: f64,
    pub gamma: Gamma,
    pub mu0: f64,
    pub outer_steps: usize,
    /// Jacobi preconditioning for CG.
    pub diagonal_scaling: bool,
    /// Largest active set the dense Newton system may have.
    pub active_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 9e-7,
            max_iter: 10_000,
            max_newton: 100,
            lambda: 0.0,
            gamma: Gamma::Auto,
            mu0: 1.05,
            outer_steps: 250,
            diagonal_scaling: false,
            active_cap: 20_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if !(self.mu0 > 1.0) || !self.mu0.is_finite() {
            return Err(Error::InvalidParameter("mu0 must exceed 1".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidParameter("lambda must be nonnegative".into()));
        }
        if let Gamma::Fixed(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter("gamma must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    RidgeCg,
    Fista,
    MrFista,
    Mrssn,
    IrMrssn,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RidgeCg => "ridge",
            Method::Fista => "fista",
            Method::MrFista => "mrfista",
            Method::Mrssn => "mrssn",
            Method::IrMrssn => "ir-mrssn",
        }
    }
}

/// One logged step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Continuation step (0 outside IR-MRSSN).
    pub outer: usize,
    pub iteration: usize,
    pub mu: f64,
    pub gamma: f64,
    pub active_size: usize,
    pub residual_inf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    /// Samplet-coordinate coefficients.
    pub beta: Vec<f64>,
    /// Single-scale coefficients `Tᵀβ`, when a basis was available.
    pub alpha: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    /// Nonzeros of the iterate the method shrinks (`α` for single-scale FISTA).
    pub final_active_size: usize,
    pub residual_inf: f64,
    pub objective: f64,
    /// Filled in by callers that can read a clock.
    pub wall_time: Option<Duration>,
    /// Per-block nonzero counts for stacked problems.
    pub block_nonzeros: Vec<usize>,
    pub log: Vec<IterationRecord>,
}

impl SolveReport {
    /// Sets `alpha = Tᵀβ` block by block; one basis per stacked block.
    pub fn fill_alpha(&mut self, bases: &[&SampletBasis]) -> Result<()> {
        self.alpha = Some(apply_blocks(bases, &self.beta, false)?);
        Ok(())
    }
}

/// `T` (`forward`) or `Tᵀ` blockwise over a stacked vector.
pub(crate) fn apply_blocks(bases: &[&SampletBasis], v: &[f64], forward: bool) -> Result<Vec<f64>> {
    let total: usize = bases.iter().map(|b| b.len()).sum();
    if total != v.len() {
        return Err(Error::LengthMismatch {
            expected: total,
            found: v.len(),
        });
    }
    let mut out = vec![0.0; v.len()];
    let mut off = 0;
    for b in bases {
        let r = off..off + b.len();
        if forward {
            b.forward_into(&v[r.clone()], &mut out[r])?;
        } else {
            b.inverse_into(&v[r.clone()], &mut out[r])?;
        }
        off += b.len();
    }
    Ok(out)
}

/// `sign(v) · max(0, |v| − w)` componentwise.
pub fn soft_shrinkage(v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: v.len(),
            found: w.len(),
        });
    }
    check_weights(w)?;
    Ok(v.iter().zip(w).map(|(&x, &t)| shrink(x, t)).collect())
}

#[inline]
pub(crate) fn shrink(x: f64, t: f64) -> f64 {
    let m = x.abs() - t;
    if m > 0.0 {
        libm::copysign(m, x)
    } else {
        0.0
    }
}

pub(crate) fn check_weights(w: &[f64]) -> Result<()> {
    if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter("weights must be finite and nonnegative".into()));
    }
    Ok(())
}

pub(crate) fn check_problem<O: LinearOperator + ?Sized>(op: &O, h: &[f64], w: &[f64], beta0: &[f64]) -> Result<()> {
    if h.len() != op.nrows() {
        return Err(Error::LengthMismatch {
            expected: op.nrows(),
            found: h.len(),
        });
    }
    for len in [w.len(), beta0.len()] {
        if len != op.ncols() {
            return Err(Error::LengthMismatch {
                expected: op.ncols(),
                found: len,
            });
        }
    }
    check_weights(w)?;
    if h.iter().chain(beta0).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("problem data"));
    }
    Ok(())
}

/// `½‖h − Kβ‖² + Σ w|β|`.
pub fn objective<O: LinearOperator + ?Sized>(op: &O, h: &[f64], w: &[f64], beta: &[f64]) -> Result<f64> {
    check_problem(op, h, w, beta)?;
    let kb = op.matvec(beta)?;
    let fit: f64 = h.iter().zip(&kb).map(|(a, b)| (a - b) * (a - b)).sum();
    let l1: f64 = w.iter().zip(beta).map(|(w, b)| w * b.abs()).sum();
    Ok(0.5 * fit + l1)
}

/// `‖β − SS_{γw}(β + γ Kᵀ(h − Kβ))‖∞`.
pub fn fixed_point_residual<O: LinearOperator + ?Sized>(
    op: &O,
    h: &[f64],
    w: &[f64],
    beta: &[f64],
    gamma: f64,
) -> Result<f64> {
    check_problem(op, h, w, beta)?;
    let kb = op.matvec(beta)?;
    let res: Vec<f64> = h.iter().zip(&kb).map(|(a, b)| a - b).collect();
    let g = op.matvec_transpose(&res)?;
    let r: Vec<f64> = (0..beta.len())
        .map(|k| beta[k] - shrink(beta[k] + gamma * g[k], gamma * w[k]))
        .collect();
    Ok(dense::norm_inf(&r))
}

pub(crate) fn count_nonzero(v: &[f64]) -> usize {
    v.iter().filter(|x| **x != 0.0).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinkage_examples() {
        assert_eq!(
            soft_shrinkage(&[2.0, -3.0, 0.5], &[1.0, 1.0, 1.0]).unwrap(),
            vec![1.0, -2.0, 0.0]
        );
        assert_eq!(soft_shrinkage(&[2.0, -3.0], &[0.0, 0.0]).unwrap(), vec![2.0, -3.0]);
        assert_eq!(soft_shrinkage(&[1.5, -1.5], &[1.5, 1.5]).unwrap(), vec![0.0, 0.0]);
        assert!(soft_shrinkage(&[1.0], &[-1.0]).is_err());
        assert!(soft_shrinkage(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            mu0: 1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            gamma: Gamma::Fixed(0.0),
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
