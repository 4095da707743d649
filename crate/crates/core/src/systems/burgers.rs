use nalgebra::{DMatrix, DVector, RowDVector};

use crate::dmd::{ModelKind, ModelStructure};
use crate::error::{Error, Result};
use crate::models::{ContinuousModel, ModelBlocks};
use crate::Scalar;

/// Viscous Burgers' equation on `(0, L)` with `n0` interior grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersConfig<T> {
    pub n0: usize,
    pub nu: T,
    pub length: T,
    /// 1-based grid index observed as the output.
    pub output_index: usize,
}

impl<T: Scalar> BurgersConfig<T> {
    /// Unit domain, output at the midpoint.
    pub fn new(n0: usize, nu: T) -> Self {
        Self { n0, nu, length: T::one(), output_index: n0.div_ceil(2) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 < 2 {
            return Err(Error::Config(format!("Burgers grid needs n0 >= 2, got {}", self.n0)));
        }
        if !(self.nu > T::zero()) || !self.nu.finite() {
            return Err(Error::Config(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.length > T::zero()) || !self.length.finite() {
            return Err(Error::Config(format!("domain length must be positive, got {}", self.length)));
        }
        if self.output_index < 1 || self.output_index > self.n0 {
            return Err(Error::Config(format!(
                "output index {} outside 1..={}",
                self.output_index, self.n0
            )));
        }
        Ok(())
    }

    /// Grid spacing `L / (n0 + 1)`.
    pub fn h(&self) -> T {
        self.length / T::from_count(self.n0 + 1)
    }
}

/// Central-difference semi-discretization as a quadratic-bilinear model of order `n0`.
///
/// Each product `c v_i v_j` with `i != j` is split as `c/2` into both Kronecker slots.
pub fn build_burgers_quadratic<T: Scalar>(cfg: &BurgersConfig<T>) -> Result<ContinuousModel<T>> {
    cfg.validate()?;
    let n = cfg.n0;
    let h = cfg.h();
    let diff = cfg.nu / (h * h);
    let half = T::one() / (h + h);
    let quarter = half * T::lit(0.5);
    let slot = |i: usize, j: usize| i * n + j;

    let mut a = DMatrix::zeros(n, n);
    let mut q = DMatrix::zeros(n, n * n);
    for k in 0..n {
        a[(k, k)] = -(diff + diff);
        if k == 0 {
            a[(0, 1)] = diff;
            q[(0, slot(0, 1))] = -quarter;
            q[(0, slot(1, 0))] = -quarter;
        } else if k == n - 1 {
            a[(k, k - 1)] = diff + diff;
            q[(k, slot(k, k - 1))] = -quarter;
            q[(k, slot(k - 1, k))] = -quarter;
        } else {
            a[(k, k - 1)] = diff;
            a[(k, k + 1)] = diff;
            q[(k, slot(k, k + 1))] = -quarter;
            q[(k, slot(k + 1, k))] = -quarter;
            q[(k, slot(k, k - 1))] = quarter;
            q[(k, slot(k - 1, k))] = quarter;
        }
    }
    let mut nmat = DMatrix::zeros(n, n);
    nmat[(0, 0)] = half;
    let mut b = DVector::zeros(n);
    b[0] = diff;
    let mut c = RowDVector::zeros(n);
    c[cfg.output_index - 1] = T::one();

    let blocks = ModelBlocks { a, b: Some(b), n: Some(nmat), q: Some(q), c: Some(c), d: None, f: None, k: None };
    ContinuousModel::new(blocks, ModelStructure::new(ModelKind::QuadraticBilinearIO))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn two_point_grid_by_hand() {
        let m = build_burgers_quadratic(&BurgersConfig::new(2, 0.01)).unwrap();
        let bl = &m.blocks;
        for (got, want) in bl.a.iter().zip([-0.18, 0.18, 0.09, -0.18]) {
            assert_close(*got, want);
        }
        assert_close(bl.b.as_ref().unwrap()[0], 0.09);
        assert_close(bl.b.as_ref().unwrap()[1], 0.0);
        assert_close(bl.n.as_ref().unwrap()[(0, 0)], 1.5);
        let q = bl.q.as_ref().unwrap();
        for row in 0..2 {
            assert_close(q[(row, 1)], -0.75);
            assert_close(q[(row, 2)], -0.75);
            assert_close(q[(row, 0)], 0.0);
            assert_close(q[(row, 3)], 0.0);
        }
        assert_eq!(bl.c.as_ref().unwrap()[0], 1.0);
    }

    #[test]
    fn interior_convection_is_antisymmetric() {
        let n = 7;
        let m = build_burgers_quadratic(&BurgersConfig::new(n, 0.05)).unwrap();
        let q = m.blocks.q.unwrap();
        for k in 1..n - 1 {
            let fwd = q[(k, k * n + k + 1)] + q[(k, (k + 1) * n + k)];
            let back = q[(k, k * n + k - 1)] + q[(k, (k - 1) * n + k)];
            assert!(fwd != 0.0);
            assert_eq!(fwd, -back);
        }
    }

    #[test]
    fn zero_state_is_equilibrium() {
        let m = build_burgers_quadratic(&BurgersConfig::new(5, 0.01)).unwrap();
        assert_eq!(m.derivative(&DVector::zeros(5), 0.0), DVector::zeros(5));
    }

    #[test]
    fn derivative_matches_pointwise_formula() {
        let cfg = BurgersConfig::new(6, 0.02);
        let m = build_burgers_quadratic(&cfg).unwrap();
        let v = DVector::from_fn(6, |i, _| (i as f64 * 0.7).sin());
        let u = 0.3;
        let (h, nu, n) = (cfg.h(), cfg.nu, 6);
        let d = nu / (h * h);
        let got = m.derivative(&v, u);
        for k in 0..n {
            let want = if k == 0 {
                -v[0] * v[1] / (2.0 * h) + d * (v[1] - 2.0 * v[0]) + (v[0] / (2.0 * h) + d) * u
            } else if k == n - 1 {
                -v[k] * v[k - 1] / (2.0 * h) + d * (-2.0 * v[k] + 2.0 * v[k - 1])
            } else {
                -v[k] * (v[k + 1] - v[k - 1]) / (2.0 * h) + d * (v[k + 1] - 2.0 * v[k] + v[k - 1])
            };
            assert!((got[k] - want).abs() < 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn full_grid_shape_and_bandwidth() {
        let m = build_burgers_quadratic(&BurgersConfig::new(40, 0.01)).unwrap();
        assert_eq!(m.order(), 40);
        for ((i, j), v) in m.blocks.a.iter().enumerate().map(|(idx, v)| ((idx % 40, idx / 40), v)) {
            if i.abs_diff(j) > 1 {
                assert_eq!(*v, 0.0);
            }
        }
        assert_eq!(m.blocks.c.unwrap()[19], 1.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(build_burgers_quadratic(&BurgersConfig::new(1, 0.01)).is_err());
        assert!(build_burgers_quadratic(&BurgersConfig::new(4, 0.0)).is_err());
        let mut cfg = BurgersConfig::new(4, 0.01);
        cfg.output_index = 5;
        assert!(build_burgers_quadratic(&cfg).is_err());
    }
}
