//! Multiresolution scattered-data approximation in samplet coordinates.
//!
//! The crate builds samplet bases (orthonormal, locally supported signed
//! measures with vanishing polynomial moments) on a cardinality balanced
//! cluster tree, compresses kernel matrices in samplet coordinates and solves
//! ridge regression and weighted ℓ¹ problems on the compressed operator.
//!
//! Everything here is `no_std` with `alloc`. File formats, the CLI, data
//! generators and wall-clock timing live in the companion `samplet` crate.
//!
//! ```
//! use samplet_core::{build_cluster_tree, PointCloud, SampletBasis};
//!
//! let pts: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
//! let cloud = PointCloud::new(1, pts).unwrap();
//! let tree = build_cluster_tree(&cloud, 4).unwrap();
//! let basis = SampletBasis::new(tree, &cloud, 1).unwrap();
//!
//! let v: Vec<f64> = (0..64).map(|i| (i as f64).sin()).collect();
//! let w = basis.forward(&v).unwrap();
//! let back = basis.inverse(&w).unwrap();
//! assert!(v.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-12));
//! ```
#![no_std]

extern crate alloc;

pub mod dense;
mod error;
pub mod geometry;
pub mod kernel;
pub mod operator;
pub mod samplet;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{bounding_box, build_cluster_tree, BoundingBox, ClusterNode, ClusterTree, PointCloud};
pub use kernel::{assemble_dense, Dictionary, Family, KernelSpec};
pub use operator::{
    compress, estimate_lipschitz, submatrix_gram, BlockOperator, CompressedOperator, LinearOperator,
};
pub use samplet::{coefficient_l1_profile, verify_dual_basis, DualCheck, L1Profile, SampletBasis};
pub use solver::{
    fista, ir_mrssn, mrssn, ridge_cg, soft_shrinkage, solve_multi_kernel, FistaMode, Gamma,
    Method, SolveReport, SolverConfig,
};

/// Crate version, recorded in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
