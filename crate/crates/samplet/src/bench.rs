//! Synthetic benchmark data, metrics and kernel field evaluation.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use samplet_core::{KernelSpec, PointCloud, SampletBasis, SolveReport};
use serde::Serialize;

use std::io::Write;

use crate::config::{CaseKind, RunConfig, SolverChoice};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::pipeline::Model;

/// Number of translates or samplets summed by the sparse generators.
pub const TERMS: usize = 10;
/// Largest number of evaluation points accepted by [`grid_eval`].
pub const GRID_BUDGET: usize = 10_000_000;
/// Relative threshold for counting ridge coefficients as nonzero.
pub const RIDGE_DROP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCase {
    pub kind: CaseKind,
    pub n: usize,
    pub seed: u64,
    pub noise_level: f64,
}

impl BenchmarkCase {
    pub fn new(kind: CaseKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            seed,
            noise_level: 0.05,
        }
    }
}

/// Known sparse structure behind generated data.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    /// Point indices of the kernel translates.
    SingleScale(Vec<usize>),
    /// Global samplet indices.
    Samplet(Vec<usize>),
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub clean: Vec<f64>,
    pub noisy: Vec<f64>,
    pub truth: Truth,
    /// Normalization constant `c`.
    pub scale: f64,
}

/// `n` points uniform in `[−0.5, 0.5]^dim`.
pub fn uniform_cloud(n: usize, dim: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n * dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
    Ok(PointCloud::new(dim, coords)?)
}

/// 1-based samplet index window `lo..=hi` for the multiresolution generator.
pub fn spms_window(n: usize) -> (usize, usize) {
    ((n / 1000).max(1), n.min(10_000))
}

/// `out_i = Σ_j k(x_i, x_j) c_j` by direct summation over the nonzero `c_j`.
pub fn kernel_apply(spec: &KernelSpec, cloud: &PointCloud, coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() != cloud.len() {
        return Err(samplet_core::Error::LengthMismatch {
            expected: cloud.len(),
            found: coeffs.len(),
        }
        .into());
    }
    eval_at(&[(spec, coeffs)], cloud, cloud.coords())
}

pub fn generate(case: &BenchmarkCase, cloud: &PointCloud, basis: &SampletBasis, spec: &KernelSpec) -> Result<Generated> {
    let n = cloud.len();
    if !(case.noise_level >= 0.0) {
        return Err(Error::Setting("noise level must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    rng.set_stream(1);
    let (clean, truth, scale) = match case.kind {
        CaseKind::Spss => {
            let mut idx = sample(&mut rng, n, TERMS.min(n)).into_vec();
            idx.sort_unstable();
            let mut c = vec![0.0; n];
            for &i in &idx {
                c[i] = 1.0;
            }
            let f = kernel_apply(spec, cloud, &c)?;
            let (f, s) = normalize(f);
            (f, Truth::SingleScale(idx), s)
        }
        CaseKind::Spms => {
            if n < 100 {
                return Err(Error::Setting("the spms generator needs at least 100 points".into()));
            }
            let (lo, hi) = spms_window(n);
            let width = hi + 1 - lo;
            let mut idx: Vec<usize> = sample(&mut rng, width, TERMS.min(width))
                .into_iter()
                .map(|k| lo - 1 + k)
                .collect();
            idx.sort_unstable();
            let mut beta = vec![0.0; n];
            for &k in &idx {
                beta[k] = 1.0;
            }
            let omega = basis.inverse(&beta)?;
            let f = kernel_apply(spec, cloud, &omega)?;
            let (f, s) = normalize(f);
            (f, Truth::Samplet(idx), s)
        }
        CaseKind::Cartoon => {
            let f = cloud
                .points()
                .map(|p| if p.iter().map(|x| x * x).sum::<f64>().sqrt() < 0.25 { 0.5 } else { 0.0 })
                .collect();
            (f, Truth::None, 1.0)
        }
    };
    let noisy = add_noise(&clean, case.noise_level, &mut rng);
    Ok(Generated {
        clean,
        noisy,
        truth,
        scale,
    })
}

/// Scales so that the largest modulus is 0.5.
fn normalize(mut f: Vec<f64>) -> (Vec<f64>, f64) {
    let m = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let c = if m > 0.0 { 0.5 / m } else { 1.0 };
    f.iter_mut().for_each(|v| *v *= c);
    (f, c)
}

/// Adds Gaussian noise rescaled to `‖η‖₂ = level · ‖clean‖₂`.
pub fn add_noise<R: Rng>(clean: &[f64], level: f64, rng: &mut R) -> Vec<f64> {
    if level == 0.0 {
        return clean.to_vec();
    }
    let eta: Vec<f64> = (0..clean.len()).map(|_| rng.sample(StandardNormal)).collect();
    let scale = level * norm2(clean) / norm2(&eta);
    clean.iter().zip(&eta).map(|(c, e)| c + scale * e).collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub iterations: usize,
    pub converged: bool,
    pub final_active_size: usize,
    pub residual_inf: f64,
    pub objective: f64,
    /// `‖h − fit‖₂ / ‖h‖₂` against the noisy data.
    pub rel_l2_error: f64,
    pub rel_inf_error: f64,
    /// `‖f − fit‖₂ / ‖f‖₂` against the clean data.
    pub clean_rel_l2_error: f64,
    /// Fraction of the ground-truth support that is recovered.
    pub support_recovery: Option<f64>,
}

/// Nonzero count: exact for ℓ¹ solutions, above `1e−4·max` for ridge.
pub fn active_count(beta: &[f64], ridge: bool) -> usize {
    if ridge {
        let m = beta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        beta.iter().filter(|v| v.abs() > RIDGE_DROP * m).count()
    } else {
        beta.iter().filter(|v| **v != 0.0).count()
    }
}

/// Indices of `|v_i| > rel · max|v|`.
pub fn thresholded_support(v: &[f64], rel: f64) -> Vec<usize> {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (0..v.len()).filter(|&i| v[i].abs() > rel * m).collect()
}

/// `fitted` holds the model values at the data sites.
pub fn metrics(report: &SolveReport, ridge: bool, fitted: &[f64], data: &Generated) -> Metrics {
    let diff: Vec<f64> = data.noisy.iter().zip(fitted).map(|(h, f)| h - f).collect();
    let h_inf = data.noisy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d_inf = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let clean_diff: Vec<f64> = data.clean.iter().zip(fitted).map(|(h, f)| h - f).collect();
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    let support_recovery = match &data.truth {
        Truth::SingleScale(idx) => report.alpha.as_ref().map(|alpha| {
            let s = thresholded_support(alpha, 1e-3);
            fraction_found(idx, &s)
        }),
        Truth::Samplet(idx) => {
            let s: Vec<usize> = if ridge {
                thresholded_support(&report.beta, RIDGE_DROP)
            } else {
                (0..report.beta.len()).filter(|&k| report.beta[k] != 0.0).collect()
            };
            Some(fraction_found(idx, &s))
        }
        Truth::None => None,
    };
    Metrics {
        iterations: report.iterations,
        converged: report.converged,
        final_active_size: active_count(&report.beta, ridge),
        residual_inf: report.residual_inf,
        objective: report.objective,
        rel_l2_error: ratio(norm2(&diff), norm2(&data.noisy)),
        rel_inf_error: ratio(d_inf, h_inf),
        clean_rel_l2_error: ratio(norm2(&clean_diff), norm2(&data.clean)),
        support_recovery,
    }
}

fn fraction_found(truth: &[usize], support: &[usize]) -> f64 {
    if truth.is_empty() {
        return 1.0;
    }
    let found = truth.iter().filter(|i| support.binary_search(i).is_ok()).count();
    found as f64 / truth.len() as f64
}

/// Axis-aligned tensor grid; `counts[k]` points along axis `k`, the last
/// axis running fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub counts: Vec<usize>,
}

impl GridSpec {
    /// `per_axis` points along every axis of the cloud's bounding box.
    pub fn over(cloud: &PointCloud, per_axis: usize) -> Self {
        let b = cloud.bbox();
        Self {
            lo: b.min.clone(),
            hi: b.max.clone(),
            counts: vec![per_axis; cloud.dim()],
        }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major coordinates of all grid points.
    pub fn points(&self) -> Vec<f64> {
        let d = self.counts.len();
        let mut out = Vec::with_capacity(self.len() * d);
        let mut idx = vec![0usize; d];
        for _ in 0..self.len() {
            for k in 0..d {
                let m = self.counts[k];
                let t = if m > 1 { idx[k] as f64 / (m - 1) as f64 } else { 0.5 };
                out.push(self.lo[k] + t * (self.hi[k] - self.lo[k]));
            }
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < self.counts[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }
}

/// `s(x) = Σ_j Σ_i α_i^{(j)} K_j(x_i, x)` at the given points, one term list
/// per dictionary entry.
pub fn eval_at(terms: &[(&KernelSpec, &[f64])], cloud: &PointCloud, points: &[f64]) -> Result<Vec<f64>> {
    let d = cloud.dim();
    if points.len() % d != 0 {
        return Err(samplet_core::Error::DimensionMismatch {
            expected: d,
            found: points.len() % d,
        }
        .into());
    }
    let mut sparse = Vec::with_capacity(terms.len());
    for (spec, alpha) in terms {
        if alpha.len() != cloud.len() {
            return Err(samplet_core::Error::LengthMismatch {
                expected: cloud.len(),
                found: alpha.len(),
            }
            .into());
        }
        spec.check_dim(d)?;
        let nz: Vec<(usize, f64)> = alpha.iter().copied().enumerate().filter(|(_, a)| *a != 0.0).collect();
        sparse.push((*spec, nz));
    }
    let out = points
        .par_chunks(d)
        .map(|x| {
            let mut s = 0.0;
            for (spec, nz) in &sparse {
                for &(i, a) in nz {
                    s += a * spec.eval(cloud.point(i), x).expect("dimension checked");
                }
            }
            s
        })
        .collect();
    Ok(out)
}

/// Evaluates the expansion on a grid by direct summation, in parallel over
/// grid rows.
pub fn grid_eval(terms: &[(&KernelSpec, &[f64])], cloud: &PointCloud, grid: &GridSpec) -> Result<Vec<f64>> {
    if grid.counts.len() != cloud.dim() {
        return Err(samplet_core::Error::DimensionMismatch {
            expected: cloud.dim(),
            found: grid.counts.len(),
        }
        .into());
    }
    let total = grid.counts.iter().try_fold(1usize, |a, &c| a.checked_mul(c)).unwrap_or(usize::MAX);
    if total > GRID_BUDGET {
        return Err(Error::Budget {
            what: "grid size",
            requested: total,
            budget: GRID_BUDGET,
        });
    }
    eval_at(terms, cloud, &grid.points())
}

/// A generated benchmark problem with its fitted model.
pub struct BenchOutcome {
    pub model: Model,
    pub data: Generated,
    pub report: SolveReport,
    pub metrics: Metrics,
}

/// Builds the `[−0.5, 0.5]²` cloud of `cfg.n` points, generates `kind` data
/// and solves with the configured solver.
pub fn run_benchmark(cfg: &RunConfig, kind: CaseKind) -> Result<BenchOutcome> {
    let prepared = prepare(cfg, kind)?;
    let choice = cfg.solver.unwrap_or(SolverChoice::Mrssn);
    prepared.solve(choice, cfg)
}

/// Data and model of a benchmark, ready for one or more solves.
pub struct Prepared {
    pub model: Model,
    pub data: Generated,
}

pub fn prepare(cfg: &RunConfig, kind: CaseKind) -> Result<Prepared> {
    let cloud = uniform_cloud(cfg.n, 2, cfg.seed)?;
    let model = Model::build(cloud, cfg)?;
    let case = BenchmarkCase {
        kind,
        n: cfg.n,
        seed: cfg.seed,
        noise_level: cfg.noise,
    };
    let data = generate(&case, &model.cloud, &model.basis, &model.specs[0])?;
    Ok(Prepared { model, data })
}

impl Prepared {
    pub fn solve(self, choice: SolverChoice, cfg: &RunConfig) -> Result<BenchOutcome> {
        let (report, metrics) = self.solve_ref(choice, cfg)?;
        let mut model = self.model;
        model.timings.solve_s = report.wall_time.map_or(0.0, crate::pipeline::secs);
        Ok(BenchOutcome {
            model,
            data: self.data,
            report,
            metrics,
        })
    }

    pub fn solve_ref(&self, choice: SolverChoice, cfg: &RunConfig) -> Result<(SolveReport, Metrics)> {
        let report = self.model.solve(&self.data.noisy, choice, cfg)?;
        let fitted = self.model.fitted(&report.beta)?;
        let m = metrics(&report, choice == SolverChoice::Ridge, &fitted, &self.data);
        Ok((report, m))
    }
}

pub const METRICS_HEADER: &str = "case,solver,n,seed,iterations,time_s,final_active_size,rel_l2_error,rel_inf_error,clean_rel_l2_error,residual_inf,objective,converged,support_recovery";

/// Header and one row in the column order of [`METRICS_HEADER`].
pub fn write_metrics_row<W: Write>(
    w: &mut W,
    kind: CaseKind,
    choice: SolverChoice,
    cfg: &RunConfig,
    out: &BenchOutcome,
) -> std::io::Result<()> {
    let m = &out.metrics;
    writeln!(w, "{METRICS_HEADER}")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        kind.name(),
        choice.name(),
        cfg.n,
        cfg.seed,
        m.iterations,
        fmt_f64(out.model.timings.solve_s),
        m.final_active_size,
        fmt_f64(m.rel_l2_error),
        fmt_f64(m.rel_inf_error),
        fmt_f64(m.clean_rel_l2_error),
        fmt_f64(m.residual_inf),
        fmt_f64(m.objective),
        m.converged,
        m.support_recovery.map_or_else(String::new, fmt_f64),
    )?;
    w.flush()
}
