#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use samplet_core::{build_cluster_tree, PointCloud, SampletBasis};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let coords = (0..n * dim).map(|_| r.gen_range(-0.5..0.5)).collect();
    PointCloud::new(dim, coords).unwrap()
}

pub fn basis(cloud: &PointCloud, q: usize) -> SampletBasis {
    let m = samplet_core::samplet::moment_dim(cloud.dim(), q);
    let tree = build_cluster_tree(cloud, 2 * m).unwrap();
    SampletBasis::new(tree, cloud, q).unwrap()
}

/// Dense T built column by column from the forward transform of unit vectors.
pub fn dense_t(basis: &SampletBasis) -> DMatrix<f64> {
    let n = basis.len();
    let mut t = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = basis.forward(&e).unwrap();
        e[j] = 0.0;
        for i in 0..n {
            t[(i, j)] = col[i];
        }
    }
    t
}

pub fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let a = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * (n as f64) * 0.1
}

/// Cyclic coordinate descent for `½‖h − Aβ‖² + Σ w|β|`, run until the
/// largest coordinate change is below `tol`.
pub fn lasso_cd(a: &DMatrix<f64>, h: &[f64], w: &[f64], tol: f64) -> Vec<f64> {
    let (m, n) = a.shape();
    let col_sq: Vec<f64> = (0..n).map(|j| a.column(j).norm_squared()).collect();
    let mut beta = vec![0.0; n];
    let mut res: Vec<f64> = h.to_vec();
    for _ in 0..1_000_000 {
        let mut change: f64 = 0.0;
        for j in 0..n {
            if col_sq[j] == 0.0 {
                continue;
            }
            let mut rho = 0.0;
            for i in 0..m {
                rho += a[(i, j)] * res[i];
            }
            rho += col_sq[j] * beta[j];
            let new = if rho > w[j] {
                (rho - w[j]) / col_sq[j]
            } else if rho < -w[j] {
                (rho + w[j]) / col_sq[j]
            } else {
                0.0
            };
            let d = new - beta[j];
            if d != 0.0 {
                for i in 0..m {
                    res[i] -= a[(i, j)] * d;
                }
                beta[j] = new;
            }
            change = change.max(d.abs());
        }
        if change < tol {
            break;
        }
    }
    beta
}

pub fn lasso_objective(a: &DMatrix<f64>, h: &[f64], w: &[f64], beta: &[f64]) -> f64 {
    let b = nalgebra::DVector::from_column_slice(beta);
    let r = nalgebra::DVector::from_column_slice(h) - a * b;
    0.5 * r.norm_squared() + w.iter().zip(beta).map(|(w, b)| w * b.abs()).sum::<f64>()
}

/// Largest KKT violation of `β` for the lasso.
pub fn kkt_violation(a: &DMatrix<f64>, h: &[f64], w: &[f64], beta: &[f64]) -> f64 {
    let b = nalgebra::DVector::from_column_slice(beta);
    let g = a.transpose() * (nalgebra::DVector::from_column_slice(h) - a * b);
    let mut worst: f64 = 0.0;
    for k in 0..beta.len() {
        let v = if beta[k] == 0.0 {
            (g[k].abs() - w[k]).max(0.0)
        } else {
            (g[k] - w[k] * beta[k].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}
