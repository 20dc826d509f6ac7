use alloc::vec::Vec;

use super::{count_nonzero, fista, ir_mrssn, mrssn, FistaMode, Gamma, Method, SolveReport, SolverConfig};
use crate::operator::{estimate_lipschitz, BlockOperator};
use crate::samplet::SampletBasis;
use crate::{Error, Result};

/// Runs an ℓ¹ solver on the stacked operator `[K₁, …, K_L]`.
///
/// `bases[j]` maps block `j` between samplet and single-scale coordinates;
/// the report carries `α` and the per-block nonzero counts of `α_j`.
pub fn solve_multi_kernel(
    block: &BlockOperator,
    bases: &[&SampletBasis],
    h: &[f64],
    w: &[f64],
    beta0: &[f64],
    method: Method,
    config: &SolverConfig,
) -> Result<SolveReport> {
    if bases.len() != block.len() {
        return Err(Error::LengthMismatch {
            expected: block.len(),
            found: bases.len(),
        });
    }
    for (j, b) in bases.iter().enumerate() {
        if b.len() != block.block_range(j).len() {
            return Err(Error::LengthMismatch {
                expected: block.block_range(j).len(),
                found: b.len(),
            });
        }
    }
    let mut report = match method {
        Method::Fista => fista(block, FistaMode::SingleScale(bases), h, w, beta0, config)?,
        Method::MrFista => fista(block, FistaMode::Multiresolution, h, w, beta0, config)?,
        Method::Mrssn => {
            let gamma = match config.gamma {
                Gamma::Fixed(g) => g,
                Gamma::Auto => 1.0 / estimate_lipschitz(block)?,
            };
            mrssn(block, h, w, beta0, gamma, config)?
        }
        Method::IrMrssn => ir_mrssn(block, h, w, beta0, config)?,
        Method::RidgeCg => {
            return Err(Error::InvalidParameter("ridge is not defined for stacked dictionaries".into()));
        }
    };
    if report.alpha.is_none() {
        report.fill_alpha(bases)?;
    }
    let alpha = report.alpha.as_deref().expect("alpha filled above");
    report.block_nonzeros = (0..block.len())
        .map(|j| count_nonzero(&alpha[block.block_range(j)]))
        .collect::<Vec<_>>();
    Ok(report)
}
