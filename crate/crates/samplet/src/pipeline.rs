//! Basis construction, compression and solver dispatch shared by the
//! subcommands and the benchmarks.

use std::time::{Duration, Instant};

use samplet_core::{
    build_cluster_tree, compress, fista, ir_mrssn, mrssn, ridge_cg, solve_multi_kernel, BlockOperator,
    CompressedOperator, FistaMode, Gamma, KernelSpec, LinearOperator, Method, PointCloud, SampletBasis, SolveReport,
};
use serde::Serialize;

use crate::config::{RunConfig, SolverChoice};
use crate::error::{Error, Result};

/// Wall-clock phases of a run; kept apart from the deterministic results.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub basis_s: f64,
    pub compress_s: f64,
    pub solve_s: f64,
    pub eval_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorStats {
    pub nnz: usize,
    pub nnz_per_row_avg: f64,
    pub tau: f64,
    pub est_rel_frobenius_error: f64,
}

impl OperatorStats {
    pub fn of(op: &CompressedOperator) -> Self {
        Self {
            nnz: op.nnz(),
            nnz_per_row_avg: op.nnz_per_row_avg(),
            tau: op.tau(),
            est_rel_frobenius_error: op.est_rel_frobenius_error(),
        }
    }
}

/// A samplet basis with one compressed operator per dictionary kernel.
pub struct Model {
    pub cloud: PointCloud,
    pub basis: SampletBasis,
    pub specs: Vec<KernelSpec>,
    pub ops: Vec<CompressedOperator>,
    pub timings: Timings,
}

impl Model {
    pub fn build(cloud: PointCloud, cfg: &RunConfig) -> Result<Self> {
        let specs = cfg.kernel_specs()?;
        for s in &specs {
            s.check_dim(cloud.dim())?;
        }
        let mut timings = Timings::default();
        let t = Instant::now();
        let tree = build_cluster_tree(&cloud, cfg.leaf_capacity_for(cloud.dim()))?;
        let basis = SampletBasis::new(tree, &cloud, cfg.q)?;
        timings.basis_s = secs(t.elapsed());
        let t = Instant::now();
        let ops = specs
            .iter()
            .map(|s| compress(&basis, s, &cloud, cfg.tau))
            .collect::<samplet_core::Result<Vec<_>>>()?;
        timings.compress_s = secs(t.elapsed());
        Ok(Self {
            cloud,
            basis,
            specs,
            ops,
            timings,
        })
    }

    /// Solves for data `h` given at the points; `alpha` is filled.
    pub fn solve(&self, h: &[f64], choice: SolverChoice, cfg: &RunConfig) -> Result<SolveReport> {
        let hs = self.basis.forward(h)?;
        let n = self.cloud.len();
        let lambda = cfg.lambda.unwrap_or(0.0);
        let weight = cfg.weight.unwrap_or(0.0);
        let sc = cfg.solver_config(lambda);
        let t = Instant::now();
        let mut report = if self.ops.len() > 1 {
            let method = match choice {
                SolverChoice::Ridge => {
                    return Err(Error::Setting("ridge is not available for kernel dictionaries".into()))
                }
                SolverChoice::Fista => Method::Fista,
                SolverChoice::Mrfista => Method::MrFista,
                SolverChoice::Mrssn => Method::IrMrssn,
                SolverChoice::Ssn => Method::Mrssn,
            };
            let block = BlockOperator::new(self.ops.clone())?;
            let len = block.ncols();
            let bases: Vec<&SampletBasis> = vec![&self.basis; self.ops.len()];
            solve_multi_kernel(&block, &bases, &hs, &vec![weight; len], &vec![0.0; len], method, &sc)?
        } else {
            let op = &self.ops[0];
            let w = vec![weight; n];
            let zero = vec![0.0; n];
            let mut r = match choice {
                SolverChoice::Ridge => ridge_cg(op, &hs, &sc)?,
                SolverChoice::Fista => fista(op, FistaMode::SingleScale(&[&self.basis]), &hs, &w, &zero, &sc)?,
                SolverChoice::Mrfista => fista(op, FistaMode::Multiresolution, &hs, &w, &zero, &sc)?,
                SolverChoice::Mrssn => ir_mrssn(op, &hs, &w, &zero, &sc)?,
                SolverChoice::Ssn => {
                    let gamma = match sc.gamma {
                        Gamma::Fixed(g) => g,
                        Gamma::Auto => 1.0 / samplet_core::estimate_lipschitz(op)?,
                    };
                    mrssn(op, &hs, &w, &zero, gamma, &sc)?
                }
            };
            if r.alpha.is_none() {
                r.fill_alpha(&[&self.basis])?;
            }
            r
        };
        let elapsed = t.elapsed();
        report.wall_time = Some(elapsed);
        Ok(report)
    }

    /// Model values at the data sites, `Tᵀ Σ_j K_j^Σ β_j`.
    pub fn fitted(&self, beta: &[f64]) -> Result<Vec<f64>> {
        let n = self.cloud.len();
        let mut acc = vec![0.0; n];
        for (j, op) in self.ops.iter().enumerate() {
            let kb = op.matvec(&beta[j * n..(j + 1) * n])?;
            acc.iter_mut().zip(&kb).for_each(|(a, b)| *a += b);
        }
        Ok(self.basis.inverse(&acc)?)
    }
}

pub fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}
