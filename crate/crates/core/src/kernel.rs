//! Kernel functions and dense kernel matrices.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use nalgebra::DMatrix;

use crate::geometry::PointCloud;
use crate::{Error, Result};

/// Largest `N` accepted by the dense assembly paths.
pub const DENSE_CAP: usize = 65536;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Radial profile of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `(1 + √3 s) e^{−√3 s}` with `s = r/ℓ`.
    Matern32,
    /// `(1 + √3/ℓ) e^{−√3 r/ℓ}`, a constant-prefactor variant. Its diagonal is
    /// not 1, it is offered only to reproduce that form when asked for.
    Matern32Literal,
    /// `e^{−s}`.
    Exponential,
    /// `e^{−s²/2}`.
    Gaussian,
    /// `exp(−2 sin²(π r / p) / ℓ²)` with period `p`.
    Periodic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Matern32 => "matern32",
            Family::Matern32Literal => "matern32-literal",
            Family::Exponential => "exponential",
            Family::Gaussian => "gaussian",
            Family::Periodic => "periodic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "matern32" => Family::Matern32,
            "matern32-literal" => Family::Matern32Literal,
            "exponential" | "exp" => Family::Exponential,
            "gaussian" => Family::Gaussian,
            "periodic" => Family::Periodic,
            _ => return None,
        })
    }
}

/// A single radial kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radial {
    pub family: Family,
    pub length: f64,
    /// Use `r / (ℓ √d)` instead of `r / ℓ`.
    pub dim_scaling: bool,
    /// Period for [`Family::Periodic`]; ignored otherwise.
    pub period: f64,
}

impl Radial {
    fn profile(&self, r: f64, dim: usize) -> f64 {
        let ell = if self.dim_scaling {
            self.length * libm::sqrt(dim as f64)
        } else {
            self.length
        };
        match self.family {
            Family::Matern32 => {
                let s = SQRT3 * r / ell;
                (1.0 + s) * libm::exp(-s)
            }
            Family::Matern32Literal => (1.0 + SQRT3 / ell) * libm::exp(-SQRT3 * r / ell),
            Family::Exponential => libm::exp(-r / ell),
            Family::Gaussian => {
                let s = r / ell;
                libm::exp(-0.5 * s * s)
            }
            Family::Periodic => {
                let s = libm::sin(PI * r / self.period);
                libm::exp(-2.0 * s * s / (self.length * self.length))
            }
        }
    }
}

/// Declarative kernel description.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Radial(Radial),
    /// Product of factors, each acting on a contiguous coordinate slice. The
    /// slices partition `0..d` in order.
    Tensor(Vec<(KernelSpec, Range<usize>)>),
}

impl KernelSpec {
    pub fn radial(family: Family, length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter("kernel length must be positive".to_string()));
        }
        Ok(KernelSpec::Radial(Radial {
            family,
            length,
            dim_scaling: false,
            period: 1.0,
        }))
    }

    pub fn matern32(length: f64) -> Result<Self> {
        Self::radial(Family::Matern32, length)
    }

    pub fn exponential(length: f64) -> Result<Self> {
        Self::radial(Family::Exponential, length)
    }

    pub fn gaussian(length: f64) -> Result<Self> {
        Self::radial(Family::Gaussian, length)
    }

    pub fn periodic(length: f64, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter("kernel period must be positive".to_string()));
        }
        let mut k = Self::radial(Family::Periodic, length)?;
        if let KernelSpec::Radial(r) = &mut k {
            r.period = period;
        }
        Ok(k)
    }

    /// Switches a radial kernel to the `r / (ℓ √d)` convention.
    pub fn with_dim_scaling(mut self, on: bool) -> Self {
        if let KernelSpec::Radial(r) = &mut self {
            r.dim_scaling = on;
        }
        self
    }

    pub fn tensor(factors: Vec<(KernelSpec, Range<usize>)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("tensor kernel without factors".to_string()));
        }
        let mut next = 0;
        for (spec, slice) in &factors {
            if slice.start != next || slice.end <= slice.start {
                return Err(Error::InvalidParameter(
                    "tensor slices must partition the coordinates in order".to_string(),
                ));
            }
            if let Some(d) = spec.required_dim() {
                if d != slice.len() {
                    return Err(Error::DimensionMismatch {
                        expected: slice.len(),
                        found: d,
                    });
                }
            }
            next = slice.end;
        }
        Ok(KernelSpec::Tensor(factors))
    }

    /// Point dimension this kernel is tied to, if any.
    pub fn required_dim(&self) -> Option<usize> {
        match self {
            KernelSpec::Radial(_) => None,
            KernelSpec::Tensor(f) => f.last().map(|(_, s)| s.end),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.required_dim() {
            Some(d) if d != dim => Err(Error::DimensionMismatch {
                expected: d,
                found: dim,
            }),
            _ => Ok(()),
        }
    }

    /// `k(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        self.check_dim(x.len())?;
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            KernelSpec::Radial(r) => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                r.profile(libm::sqrt(d2), x.len())
            }
            KernelSpec::Tensor(f) => f
                .iter()
                .map(|(k, s)| k.eval_unchecked(&x[s.clone()], &y[s.clone()]))
                .product(),
        }
    }
}

/// Ordered list of kernels `[K₁, …, K_L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    kernels: Vec<KernelSpec>,
}

impl Dictionary {
    pub fn new(kernels: Vec<KernelSpec>) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidParameter("empty kernel dictionary".to_string()));
        }
        Ok(Self { kernels })
    }

    pub fn kernels(&self) -> &[KernelSpec] {
        &self.kernels
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }
}

/// Dense kernel matrix `K[i][j] = k(x_i, x_j)` in point order.
pub fn assemble_dense(spec: &KernelSpec, cloud: &PointCloud) -> Result<DMatrix<f64>> {
    assemble_dense_capped(spec, cloud, DENSE_CAP)
}

pub fn assemble_dense_capped(spec: &KernelSpec, cloud: &PointCloud, cap: usize) -> Result<DMatrix<f64>> {
    let order: Vec<usize> = (0..cloud.len()).collect();
    let n = cloud.len();
    let rows = assemble_rows(spec, cloud, &order, cap)?;
    // symmetric, so row-major data is also its column-major form
    Ok(DMatrix::from_vec(n, n, rows))
}

/// Row-major kernel matrix with rows and columns in the given point order.
pub(crate) fn assemble_rows(spec: &KernelSpec, cloud: &PointCloud, order: &[usize], cap: usize) -> Result<Vec<f64>> {
    let n = order.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "dense kernel assembly",
            requested: n,
            cap,
        });
    }
    spec.check_dim(cloud.dim())?;
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        let xi = cloud.point(order[i]);
        for j in i..n {
            let v = spec.eval_unchecked(xi, cloud.point(order[j]));
            if !v.is_finite() {
                return Err(Error::NonFinite("kernel value"));
            }
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn unit_diagonal() {
        let x = [0.3, -0.7, 2.0];
        for spec in [
            KernelSpec::matern32(0.2).unwrap(),
            KernelSpec::exponential(0.03).unwrap().with_dim_scaling(true),
            KernelSpec::gaussian(1.5).unwrap(),
            KernelSpec::periodic(0.2, 1.0).unwrap(),
        ] {
            assert_eq!(spec.eval(&x, &x).unwrap(), 1.0);
        }
    }

    #[test]
    fn exponential_with_dim_scaling() {
        let k = KernelSpec::exponential(0.03).unwrap().with_dim_scaling(true);
        let r = 0.03 * libm::sqrt(3.0);
        let v = k.eval(&[0.0, 0.0, 0.0], &[r, 0.0, 0.0]).unwrap();
        assert!((v - libm::exp(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn periodic_has_unit_period() {
        let k = KernelSpec::periodic(0.2, 1.0).unwrap();
        let v = k.eval(&[0.25], &[1.25]).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
        // ℓ = 0.2 gives exp(−50 sin²(π r))
        let r: f64 = 0.1;
        let s = libm::sin(PI * r);
        assert!((k.eval(&[0.0], &[r]).unwrap() - libm::exp(-50.0 * s * s)).abs() < 1e-15);
    }

    #[test]
    fn literal_matern_prefactor() {
        let k = KernelSpec::radial(Family::Matern32Literal, 0.2).unwrap();
        let v = k.eval(&[0.0], &[0.0]).unwrap();
        assert!((v - (1.0 + 5.0 * SQRT3)).abs() < 1e-12);
    }

    #[test]
    fn tensor_is_product_of_slices() {
        let a = KernelSpec::matern32(0.2).unwrap();
        let b = KernelSpec::periodic(0.2, 1.0).unwrap();
        let t = KernelSpec::tensor(vec![(a.clone(), 0..2), (b.clone(), 2..3)]).unwrap();
        let x = [0.1, 0.2, 0.3];
        let y = [0.0, 0.25, 0.9];
        let expect = a.eval(&x[..2], &y[..2]).unwrap() * b.eval(&x[2..], &y[2..]).unwrap();
        assert_eq!(t.eval(&x, &y).unwrap(), expect);
        assert!(matches!(t.eval(&x[..2], &y[..2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bad_specs() {
        assert!(KernelSpec::matern32(0.0).is_err());
        assert!(KernelSpec::periodic(0.2, -1.0).is_err());
        let a = KernelSpec::matern32(1.0).unwrap();
        assert!(KernelSpec::tensor(vec![(a.clone(), 1..2)]).is_err());
        assert!(KernelSpec::tensor(vec![(a.clone(), 0..1), (a, 2..3)]).is_err());
        assert!(Dictionary::new(vec![]).is_err());
        assert!(KernelSpec::matern32(1.0).unwrap().eval(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn monotone_decay() {
        for spec in [
            KernelSpec::matern32(0.3).unwrap(),
            KernelSpec::exponential(0.3).unwrap(),
            KernelSpec::gaussian(0.3).unwrap(),
        ] {
            let mut prev = 1.0;
            for i in 1..50 {
                let v = spec.eval(&[0.0], &[i as f64 * 0.05]).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn dense_cap() {
        let cloud = PointCloud::new(1, vec![0.0, 1.0, 2.0]).unwrap();
        let k = KernelSpec::matern32(1.0).unwrap();
        assert!(matches!(
            assemble_dense_capped(&k, &cloud, 2),
            Err(Error::CapExceeded { .. })
        ));
        let single = PointCloud::new(1, vec![0.5]).unwrap();
        assert_eq!(assemble_dense(&k, &single).unwrap()[(0, 0)], 1.0);
    }
}
