use nalgebra::{DMatrix, DVector, RowDVector};

use super::{DiscreteModel, ModelBlocks};
use crate::error::{Error, Result};
use crate::linalg::kron_vec;
use crate::Scalar;

/// States `[x_0 … x_m]` and, when the model has an output equation, `[y_0 … y_{m-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Scalar> {
    pub states: DMatrix<T>,
    pub outputs: Option<RowDVector<T>>,
}

/// `A x + Q (x⊗x) + N x u + B u` with absent blocks skipped.
pub(crate) fn state_update<T: Scalar>(blocks: &ModelBlocks<T>, x: &DVector<T>, u: T) -> DVector<T> {
    let mut next = &blocks.a * x;
    if let Some(q) = &blocks.q {
        next += q * kron_vec(x);
    }
    if let Some(n) = &blocks.n {
        next += (n * x) * u;
    }
    if let Some(b) = &blocks.b {
        next.axpy(u, b, T::one());
    }
    next
}

/// `C x + K (x⊗x) + F x u + D u`, `None` when no output block exists.
pub(crate) fn output_map<T: Scalar>(blocks: &ModelBlocks<T>, x: &DVector<T>, u: T) -> Option<T> {
    if !blocks.has_output() {
        return None;
    }
    let mut y = T::zero();
    if let Some(c) = &blocks.c {
        y += c.dot(&x.transpose());
    }
    if let Some(k) = &blocks.k {
        y += k.dot(&kron_vec(x).transpose());
    }
    if let Some(f) = &blocks.f {
        y += f.dot(&x.transpose()) * u;
    }
    if let Some(d) = blocks.d {
        y += d * u;
    }
    Some(y)
}

/// Runs the discrete recursion over the input sequence `u` from `x0`.
///
/// Stops with [`Error::Divergence`] at the first step producing a non-finite state.
pub fn simulate_discrete<T: Scalar>(
    model: &DiscreteModel<T>,
    u: &RowDVector<T>,
    x0: &DVector<T>,
) -> Result<Trajectory<T>> {
    let n = model.order();
    if x0.len() != n {
        return Err(Error::dim(format!("initial state has length {}, model order is {n}", x0.len())));
    }
    let m = u.len();
    let mut states = DMatrix::zeros(n, m + 1);
    states.set_column(0, x0);
    let mut outputs = model.blocks.has_output().then(|| RowDVector::zeros(m));
    let mut x = x0.clone();
    for k in 0..m {
        let uk = u[k];
        if let (Some(ys), Some(yk)) = (outputs.as_mut(), output_map(&model.blocks, &x, uk)) {
            ys[k] = yk;
        }
        x = state_update(&model.blocks, &x, uk);
        if !x.iter().all(|v| v.finite()) {
            return Err(Error::Divergence { step: k + 1 });
        }
        states.set_column(k + 1, &x);
    }
    Ok(Trajectory { states, outputs })
}
