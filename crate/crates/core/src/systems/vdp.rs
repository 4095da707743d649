use nalgebra::{DVector, RowDVector};

use crate::error::{Error, Result};
use crate::models::Trajectory;
use crate::Scalar;

/// Three coupled van der Pol oscillators; the input drives the middle one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpConfig<T> {
    pub mu: T,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> VdpConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if [self.mu, self.a, self.b].iter().all(|v| v.finite()) {
            Ok(())
        } else {
            Err(Error::Config("van der Pol parameters must be finite".into()))
        }
    }
}

/// `-x - μ(x² - 1)ẋ` plus the coupling to one neighbour. Shared by both outer
/// oscillators so symmetric trajectories stay bitwise identical.
fn outer<T: Scalar>(cfg: &VdpConfig<T>, pos: T, vel: T, npos: T, nvel: T) -> T {
    -pos - cfg.mu * (pos * pos - T::one()) * vel + cfg.a * (npos - pos) + cfg.b * (nvel - vel)
}

/// Right-hand side of the six coupled equations; the output is `y = x₃`.
pub fn vdp_step<T: Scalar>(cfg: &VdpConfig<T>, x: &DVector<T>, u: T) -> DVector<T> {
    assert_eq!(x.len(), 6, "van der Pol state has six entries");
    let (x1, x2, x3, x4, x5, x6) = (x[0], x[1], x[2], x[3], x[4], x[5]);
    let mid = -x3 - cfg.mu * (x3 * x3 - T::one()) * x4
        + cfg.a * (x1 - x3)
        + cfg.b * (x2 - x4)
        + cfg.a * (x5 - x3)
        + cfg.b * (x6 - x4)
        + u;
    DVector::from_vec(vec![
        x2,
        outer(cfg, x1, x2, x3, x4),
        x4,
        mid,
        x6,
        outer(cfg, x5, x6, x3, x4),
    ])
}

/// Explicit Euler trajectory with outputs `y_k = x₃(t_k)`.
pub fn simulate_vdp<T: Scalar>(
    cfg: &VdpConfig<T>,
    dt: T,
    u: &RowDVector<T>,
    x0: &DVector<T>,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    if x0.len() != 6 {
        return Err(Error::dim(format!("van der Pol state has 6 entries, got {}", x0.len())));
    }
    super::euler(|x, uk| vdp_step(cfg, x, uk), |x| x[2], dt, u, x0)
}
