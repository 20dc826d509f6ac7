mod common;

use common::{basis, kkt_violation, lasso_cd, lasso_objective, random_spd, rng, uniform_cloud};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use samplet_core::operator::estimate_lipschitz;
use samplet_core::solver::fixed_point_residual;
use samplet_core::{
    assemble_dense, compress, fista, ir_mrssn, mrssn, ridge_cg, solve_multi_kernel, BlockOperator, CompressedOperator,
    Error, FistaMode, Gamma, KernelSpec, LinearOperator, Method, SolverConfig,
};

/// Random lasso instance in samplet coordinates of a Matérn kernel.
fn kernel_instance(n: usize, seed: u64) -> (CompressedOperator, DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let cloud = uniform_cloud(n, 2, seed);
    let b = basis(&cloud, 1);
    let ell = r.gen_range(0.1..0.4);
    let op = compress(&b, &KernelSpec::matern32(ell).unwrap(), &cloud, 0.0).unwrap();
    let a = op.to_dense();
    let h: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let g = a.transpose() * DVector::from_column_slice(&h);
    let scale = r.gen_range(0.02..0.3) * g.amax();
    let w: Vec<f64> = (0..n).map(|_| scale * r.gen_range(0.5..1.5)).collect();
    (op, a, h, w)
}

/// Large steps make the active set update behave like a primal-dual active
/// set method; steps near `1/L` cycle on these ill-conditioned instances.
fn newton_gamma<O: LinearOperator>(op: &O) -> f64 {
    1e4 / estimate_lipschitz(op).unwrap()
}

fn tight() -> SolverConfig {
    SolverConfig {
        tol: 1e-11,
        max_iter: 200_000,
        ..SolverConfig::default()
    }
}

#[test]
fn scalar_newton_example() {
    let op = CompressedOperator::identity(1);
    let r = mrssn(&op, &[2.0], &[1.0], &[0.0], 0.5, &SolverConfig::default()).unwrap();
    assert_eq!(r.beta, vec![1.0]);
    assert!(r.iterations <= 2);
    assert!(r.converged);
}

#[test]
fn orthonormal_lasso_closed_form() {
    let op = CompressedOperator::identity(2);
    let r = fista(&op, FistaMode::Multiresolution, &[2.0, 0.0], &[1.0, 1.0], &[0.0, 0.0], &SolverConfig::default())
        .unwrap();
    assert!((r.beta[0] - 1.0).abs() < 1e-6 && r.beta[1] == 0.0);
    assert_eq!(r.method, Method::MrFista);
}

#[test]
fn newton_without_weights_solves_linear_system() {
    let k = random_spd(20, 3);
    let op = CompressedOperator::from_dense(&k, 0.0).unwrap();
    let h: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
    let g = 1.0 / estimate_lipschitz(&op).unwrap();
    let r = mrssn(&op, &h, &[0.0; 20], &[0.0; 20], g, &SolverConfig::default()).unwrap();
    assert!(r.iterations <= 2);
    let x = k.clone().cholesky().unwrap().solve(&DVector::from_column_slice(&h));
    for i in 0..20 {
        assert!((r.beta[i] - x[i]).abs() < 1e-9);
    }
    let f = fista(&op, FistaMode::Multiresolution, &h, &[0.0; 20], &[0.0; 20], &SolverConfig::default()).unwrap();
    let kb = op.matvec(&f.beta).unwrap();
    assert!(kb.iter().zip(&h).all(|(a, b)| (a - b).abs() < 1e-5));
}

#[test]
fn lasso_solvers_match_coordinate_descent() {
    for seed in 0..12 {
        let n = 16 + (seed as usize * 7) % 48;
        let (op, a, h, w) = kernel_instance(n, 100 + seed);
        let oracle = lasso_cd(&a, &h, &w, 1e-13);
        let f_star = lasso_objective(&a, &h, &w, &oracle);

        let g = newton_gamma(&op);
        let r = mrssn(&op, &h, &w, &vec![0.0; n], g, &tight()).unwrap();
        assert!(r.converged, "seed {seed}");
        assert!((r.objective - f_star).abs() <= 1e-8 * f_star.max(1.0), "seed {seed}");
        assert!(kkt_violation(&a, &h, &w, &r.beta) < 1e-8, "seed {seed}");
        for (x, y) in r.beta.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-6, "seed {seed}");
        }

        let ir = ir_mrssn(
            &op,
            &h,
            &w,
            &vec![0.0; n],
            &SolverConfig {
                outer_steps: 40,
                gamma: Gamma::Fixed(g),
                ..tight()
            },
        )
        .unwrap();
        assert!(ir.converged, "seed {seed}");
        assert!((ir.objective - f_star).abs() <= 1e-8 * f_star.max(1.0), "seed {seed}");

        let f = fista(&op, FistaMode::Multiresolution, &h, &w, &vec![0.0; n], &tight()).unwrap();
        assert!((f.objective - f_star).abs() <= 1e-8 * f_star.max(1.0), "seed {seed}: {} vs {f_star}", f.objective);
    }
}

#[test]
fn single_scale_fista_solves_single_scale_lasso() {
    let n = 48;
    let cloud = uniform_cloud(n, 2, 21);
    let b = basis(&cloud, 1);
    let spec = KernelSpec::matern32(0.3).unwrap();
    let k = assemble_dense(&spec, &cloud).unwrap();
    let op = compress(&b, &spec, &cloud, 0.0).unwrap();
    let h: Vec<f64> = cloud.points().map(|p| (3.0 * p[0]).sin() + p[1]).collect();
    let w = vec![0.01; n];
    let oracle = lasso_cd(&k, &h, &w, 1e-13);
    let f_star = lasso_objective(&k, &h, &w, &oracle);
    let hs = b.forward(&h).unwrap();
    let r = fista(&op, FistaMode::SingleScale(&[&b]), &hs, &w, &vec![0.0; n], &tight()).unwrap();
    assert_eq!(r.method, Method::Fista);
    let alpha = r.alpha.as_ref().unwrap();
    assert!((lasso_objective(&k, &h, &w, alpha) - f_star).abs() < 1e-8);
    assert!((r.objective - f_star).abs() < 1e-8);
    let back = b.inverse(&r.beta).unwrap();
    for (x, y) in back.iter().zip(alpha) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn fixed_point_holds_for_other_gammas() {
    let (op, _, h, w) = kernel_instance(40, 7);
    let g = newton_gamma(&op);
    let cfg = SolverConfig {
        tol: 1e-10,
        ..SolverConfig::default()
    };
    let r = mrssn(&op, &h, &w, &[0.0; 40], g, &cfg).unwrap();
    for s in [0.1, 1.0, 10.0] {
        let res = fixed_point_residual(&op, &h, &w, &r.beta, s * g).unwrap();
        assert!(res <= 10.0 * s.max(1.0) * cfg.tol, "scale {s}: {res}");
    }
    let obj0 = samplet_core::solver::objective(&op, &h, &w, &[0.0; 40]).unwrap();
    assert!(r.objective <= obj0);
}

#[test]
fn ir_mrssn_without_continuation_is_mrssn() {
    let (op, _, h, w) = kernel_instance(30, 9);
    let g = 0.7 / estimate_lipschitz(&op).unwrap();
    let cfg = SolverConfig {
        outer_steps: 0,
        gamma: Gamma::Fixed(g),
        ..SolverConfig::default()
    };
    let a = ir_mrssn(&op, &h, &w, &[0.0; 30], &cfg).unwrap();
    let b = mrssn(&op, &h, &w, &[0.0; 30], g, &cfg).unwrap();
    assert_eq!(a.beta, b.beta);
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.method, Method::IrMrssn);
}

#[test]
fn weak_continuation_matches_plain_newton() {
    let (op, _, h, w) = kernel_instance(30, 10);
    let g = newton_gamma(&op);
    let cfg = SolverConfig {
        mu0: 1.0 + 1e-9,
        outer_steps: 5,
        gamma: Gamma::Fixed(g),
        tol: 1e-10,
        ..SolverConfig::default()
    };
    let a = ir_mrssn(&op, &h, &w, &[0.0; 30], &cfg).unwrap();
    let b = mrssn(&op, &h, &w, &[0.0; 30], g, &cfg).unwrap();
    for (x, y) in a.beta.iter().zip(&b.beta) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn newton_errors() {
    // KᵀK = [[1, 1], [1, 1]] factors with an exact zero pivot
    let op = CompressedOperator::from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]), 0.0).unwrap();
    let e = mrssn(&op, &[1.0, 2.0], &[0.0, 0.0], &[0.0, 0.0], 0.1, &SolverConfig::default()).unwrap_err();
    assert!(matches!(e, Error::SingularActiveSystem { .. }));

    let op = CompressedOperator::identity(5);
    let cfg = SolverConfig {
        active_cap: 2,
        ..SolverConfig::default()
    };
    let e = mrssn(&op, &[1.0; 5], &[0.0; 5], &[0.0; 5], 0.5, &cfg).unwrap_err();
    assert!(matches!(e, Error::ActiveSetTooLarge { size: 5, cap: 2 }));
    let e = ir_mrssn(&op, &[1.0; 5], &[0.0; 5], &[0.0; 5], &cfg).unwrap_err();
    assert!(matches!(e, Error::OuterStep { .. }));
    assert!(mrssn(&op, &[1.0; 4], &[0.0; 5], &[0.0; 5], 0.5, &cfg).is_err());
    assert!(mrssn(&op, &[1.0; 5], &[-1.0; 5], &[0.0; 5], 0.5, &cfg).is_err());
}

#[test]
fn ridge_matches_dense_and_is_transform_invariant() {
    let n = 256;
    let cloud = uniform_cloud(n, 2, 31);
    let b = basis(&cloud, 2);
    let spec = KernelSpec::matern32(0.25).unwrap();
    let k = assemble_dense(&spec, &cloud).unwrap();
    let lambda = 2e-5 * n as f64;
    let h: Vec<f64> = cloud.points().map(|p| (4.0 * p[0]).cos() * p[1]).collect();
    let alpha = (k.clone() + DMatrix::identity(n, n) * lambda)
        .cholesky()
        .unwrap()
        .solve(&DVector::from_column_slice(&h));
    let op = compress(&b, &spec, &cloud, 0.0).unwrap();
    let hs = b.forward(&h).unwrap();
    for scaling in [false, true] {
        let cfg = SolverConfig {
            lambda,
            tol: 1e-12,
            diagonal_scaling: scaling,
            ..SolverConfig::default()
        };
        let r = ridge_cg(&op, &hs, &cfg).unwrap();
        assert!(r.converged);
        let ta = b.forward(alpha.as_slice()).unwrap();
        let scale = alpha.amax();
        for (x, y) in r.beta.iter().zip(&ta) {
            assert!((x - y).abs() <= 1e-8 * scale);
        }
        // single-scale CG on the same dense matrix
        let single = CompressedOperator::from_dense(&k, 0.0).unwrap();
        let rs = ridge_cg(&single, &h, &cfg).unwrap();
        let t_rs = b.forward(&rs.beta).unwrap();
        for (x, y) in r.beta.iter().zip(&t_rs) {
            assert!((x - y).abs() <= 1e-8 * scale);
        }
    }
}

#[test]
fn ridge_limits_and_errors() {
    let op = CompressedOperator::identity(4);
    let h = [1.0, -2.0, 0.5, 3.0];
    let r = ridge_cg(&op, &h, &SolverConfig::default()).unwrap();
    assert_eq!(r.iterations, 1);
    assert_eq!(r.beta, h.to_vec());

    let k = random_spd(30, 4);
    let op = CompressedOperator::from_dense(&k, 0.0).unwrap();
    let hv: Vec<f64> = (0..30).map(|i| i as f64 - 10.0).collect();
    let cfg = SolverConfig {
        lambda: 1e8,
        tol: 1e-14,
        ..SolverConfig::default()
    };
    let r = ridge_cg(&op, &hv, &cfg).unwrap();
    let want: Vec<f64> = hv.iter().map(|y| y / 1e8).collect();
    let err = r.beta.iter().zip(&want).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let norm = want.iter().map(|y| y * y).sum::<f64>().sqrt();
    assert!(err <= 1e-6 * norm);

    let neg = CompressedOperator::from_dense(&(-DMatrix::<f64>::identity(3, 3)), 0.0).unwrap();
    let e = ridge_cg(&neg, &[1.0, 1.0, 1.0], &SolverConfig::default()).unwrap_err();
    assert!(matches!(e, Error::RidgeBreakdown { .. }));
}

#[test]
fn gradient_matches_finite_differences() {
    let mut r = rng(55);
    let (op, _, h, _) = kernel_instance(64, 55);
    let beta: Vec<f64> = (0..64).map(|_| r.gen_range(-1.0..1.0)).collect();
    let f = |b: &[f64]| {
        let kb = op.matvec(b).unwrap();
        0.5 * h.iter().zip(&kb).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    };
    let kb = op.matvec(&beta).unwrap();
    let res: Vec<f64> = kb.iter().zip(&h).map(|(a, b)| a - b).collect();
    let grad = op.matvec_transpose(&res).unwrap();
    let eps = 1e-5;
    for k in 0..64 {
        let mut p = beta.clone();
        let mut m = beta.clone();
        p[k] += eps;
        m[k] -= eps;
        let fd = (f(&p) - f(&m)) / (2.0 * eps);
        assert!((fd - grad[k]).abs() <= 1e-6 * grad[k].abs().max(1.0), "k {k}: {fd} vs {}", grad[k]);
    }
}

#[test]
fn multi_kernel_dictionary() {
    let n = 40;
    let cloud = uniform_cloud(n, 2, 77);
    let b = basis(&cloud, 1);
    let spec = KernelSpec::matern32(0.3).unwrap();
    let op = compress(&b, &spec, &cloud, 0.0).unwrap();
    let h: Vec<f64> = cloud.points().map(|p| (5.0 * p[0]).sin()).collect();
    let hs = b.forward(&h).unwrap();
    let w = vec![1e-3; n];
    let cfg = SolverConfig {
        tol: 1e-10,
        outer_steps: 30,
        ..SolverConfig::default()
    };

    let single = ir_mrssn(&op, &hs, &w, &vec![0.0; n], &cfg).unwrap();
    let one = solve_multi_kernel(
        &BlockOperator::new(vec![op.clone()]).unwrap(),
        &[&b],
        &hs,
        &w,
        &vec![0.0; n],
        Method::IrMrssn,
        &cfg,
    )
    .unwrap();
    assert_eq!(one.beta, single.beta);
    assert_eq!(one.block_nonzeros.len(), 1);

    // identical blocks: same optimal value, split is not unique
    let two = BlockOperator::new(vec![op.clone(), op.clone()]).unwrap();
    let w2 = vec![1e-3; 2 * n];
    let r = solve_multi_kernel(&two, &[&b, &b], &hs, &w2, &vec![0.0; 2 * n], Method::MrFista, &SolverConfig {
        tol: 1e-10,
        max_iter: 200_000,
        ..SolverConfig::default()
    })
    .unwrap();
    let dense = op.to_dense();
    let single_obj = lasso_objective(&dense, &hs, &w, &lasso_cd(&dense, &hs, &w, 1e-13));
    assert!((r.objective - single_obj).abs() < 1e-8, "{} vs {single_obj}", r.objective);

    // identity and zero: everything lands in block 1
    let zero = CompressedOperator::from_dense(&DMatrix::zeros(n, n), 0.0).unwrap();
    let blk = BlockOperator::new(vec![CompressedOperator::identity(n), zero]).unwrap();
    let r = solve_multi_kernel(&blk, &[&b, &b], &hs, &w2, &vec![0.0; 2 * n], Method::IrMrssn, &cfg).unwrap();
    assert_eq!(r.block_nonzeros[1], 0);
    assert!(r.block_nonzeros[0] > 0);
    assert!(r.beta[n..].iter().all(|x| *x == 0.0));
}
