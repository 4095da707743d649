//! Benchmark systems used to generate training and test data.

mod burgers;
mod carleman;
mod vdp;

pub use burgers::{build_burgers_quadratic, BurgersConfig};
pub use carleman::{carleman_bilinearize, LiftedBilinear, MAX_DENSE_ENTRIES};
pub use vdp::{simulate_vdp, vdp_step, VdpConfig};

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::error::{Error, Result};
use crate::models::Trajectory;
use crate::Scalar;

/// Explicit Euler `x_{k+1} = x_k + dt f(x_k, u_k)` with output `y_k = g(x_k)`.
pub(crate) fn euler<T: Scalar>(
    mut rhs: impl FnMut(&DVector<T>, T) -> DVector<T>,
    output: impl Fn(&DVector<T>) -> T,
    dt: T,
    u: &RowDVector<T>,
    x0: &DVector<T>,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) {
        return Err(Error::TimeStep(dt.as_f64()));
    }
    let m = u.len();
    let mut states = DMatrix::zeros(x0.len(), m + 1);
    let mut outputs = RowDVector::zeros(m);
    states.set_column(0, x0);
    let mut x = x0.clone();
    for k in 0..m {
        outputs[k] = output(&x);
        let dx = rhs(&x, u[k]);
        x.axpy(dt, &dx, T::one());
        if !x.iter().all(|v| v.finite()) {
            return Err(Error::Divergence { step: k + 1 });
        }
        states.set_column(k + 1, &x);
    }
    Ok(Trajectory { states, outputs: Some(outputs) })
}
