use nalgebra::{DMatrix, DVector, RowDVector};

use super::{BlockLabel, RegressorBundle};
use crate::error::{Error, Result};
use crate::linalg::{mul_kron_self, pinv_apply, truncated_svd, TruncationPolicy};
use crate::models::{DiscreteModel, ModelBlocks};
use crate::Scalar;

/// Full-order least-squares fit `G = Γ Ω⁺` split into model blocks.
#[derive(Debug, Clone)]
pub struct FullOrderFit<T: Scalar> {
    /// `Ā, B̄, N̄, Q̄` and, for input-output structures, `C̄, D̄, F̄, K̄`.
    pub blocks: ModelBlocks<T>,
    /// The stacked solution, columns ordered like the rows of `Ω`.
    pub g: DMatrix<T>,
    /// Truncation order `p` of the pseudoinverse.
    pub rank: usize,
    /// `‖Γ − G Ω‖_F`
    pub residual: T,
    /// Every singular value of `Ω`.
    pub omega_spectrum: Vec<T>,
    pub bundle_layout: Vec<super::RowBlock>,
    pub structure: super::ModelStructure,
    pub dt: T,
}

impl<T: Scalar> FullOrderFit<T> {
    /// The unreduced discrete model.
    pub fn to_discrete_model(&self) -> Result<DiscreteModel<T>> {
        DiscreteModel::new(self.blocks.clone(), self.dt, self.structure)
    }

    pub fn order(&self) -> usize {
        self.blocks.order()
    }
}

fn warn_if_clipped<T: Scalar>(policy: TruncationPolicy<T>, kept: usize, what: &str) {
    if let TruncationPolicy::FixedRank(r) = policy {
        if r > kept {
            log::warn!("requested rank {r} for {what} exceeds its numerical rank; clipped to {kept}");
        }
    }
}

/// Solves `min ‖Γ − G Ω‖_F` with the pseudoinverse of `Ω` truncated by `policy_p`.
pub fn fit_full<T: Scalar>(bundle: &RegressorBundle<T>, policy_p: TruncationPolicy<T>) -> Result<FullOrderFit<T>> {
    let omega = &bundle.omega;
    let gamma = &bundle.gamma;
    let structure = bundle.structure;
    let n = bundle.state_dim;
    if gamma.ncols() != omega.ncols() {
        return Err(Error::dim(format!(
            "Γ has {} columns but Ω has {}",
            gamma.ncols(),
            omega.ncols()
        )));
    }
    if omega.iter().all(|v| *v == T::zero()) {
        return Err(Error::Singular);
    }

    let factors = truncated_svd(omega, policy_p)?;
    warn_if_clipped(policy_p, factors.rank(), "Ω");
    if structure.has_input() {
        let silent = |label| {
            bundle
                .block(label)
                .map(|b| omega.rows(b.rows.start, b.rows.len()).iter().all(|v| *v == T::zero()))
                .unwrap_or(false)
        };
        if silent(BlockLabel::Input) {
            log::warn!("input is identically zero; input-driven blocks are not identifiable");
        } else if silent(BlockLabel::BilinearZ) {
            log::warn!("bilinear regressor rows vanish; N is not identifiable");
        }
    }

    let mut g = pinv_apply(&factors, gamma)?;

    // Output row without the quadratic term: refit against [X; U; X U_D] only.
    if structure.has_output() && structure.has_quadratic() && !structure.include_quadratic_output {
        let t_rows = bundle.block(BlockLabel::QuadraticT).expect("quadratic layout").rows.clone();
        let reduced = omega.rows(0, t_rows.start).into_owned();
        let out_factors = truncated_svd(&reduced, policy_p)?;
        let y = gamma.rows(n, 1).into_owned();
        let g_out = pinv_apply(&out_factors, &y)?;
        g.row_mut(n).fill(T::zero());
        g.view_mut((n, 0), (1, t_rows.start)).copy_from(&g_out);
    }

    let residual = (gamma - &g * omega).norm();
    let blocks = split_blocks(&g, bundle);
    Ok(FullOrderFit {
        blocks,
        g,
        rank: factors.rank(),
        residual,
        omega_spectrum: factors.spectrum,
        bundle_layout: bundle.row_layout.clone(),
        structure,
        dt: bundle.dt,
    })
}

fn split_blocks<T: Scalar>(g: &DMatrix<T>, bundle: &RegressorBundle<T>) -> ModelBlocks<T> {
    let n = bundle.state_dim;
    let structure = bundle.structure;
    let cols = |label| bundle.block(label).map(|b| b.rows.clone());
    let state = |label| cols(label).map(|r| g.view((0, r.start), (n, r.len())).into_owned());
    let output = |label| {
        if !structure.has_output() {
            return None;
        }
        cols(label).map(|r| RowDVector::from_iterator(r.len(), g.row(n).columns(r.start, r.len()).iter().copied()))
    };

    let a = state(BlockLabel::State).expect("state block always present");
    let b = state(BlockLabel::Input).map(|m| DVector::from_column_slice(m.as_slice()));
    let k = if structure.has_quadratic_output() { output(BlockLabel::QuadraticT) } else { None };
    ModelBlocks {
        a,
        b,
        n: state(BlockLabel::BilinearZ),
        q: state(BlockLabel::QuadraticT),
        c: output(BlockLabel::State),
        d: output(BlockLabel::Input).map(|r| r[0]),
        f: output(BlockLabel::BilinearZ),
        k,
    }
}

/// Projects a full-order fit onto the columns of `basis` (`x = V̂ x̃`).
///
/// `Ã = V̂ᵀĀV̂`, `B̃ = V̂ᵀB̄`, `Ñ = V̂ᵀN̄V̂`, `Q̃ = V̂ᵀQ̄(V̂⊗V̂)`, `C̃ = C̄V̂`, `D̃ = D̄`,
/// `F̃ = F̄V̂`, `K̃ = K̄(V̂⊗V̂)`.
pub fn project<T: Scalar>(full: &FullOrderFit<T>, basis: &DMatrix<T>) -> Result<DiscreteModel<T>> {
    let n = full.order();
    if basis.nrows() != n {
        return Err(Error::dim(format!("basis has {} rows, model order is {n}", basis.nrows())));
    }
    let vt = basis.transpose();
    let fb = &full.blocks;
    let row_times = |r: &RowDVector<T>| r * basis;
    let row_kron = |r: &RowDVector<T>| {
        let m = DMatrix::from_row_slice(1, r.len(), r.as_slice());
        let p = mul_kron_self(&m, basis);
        RowDVector::from_row_slice(p.as_slice())
    };
    let blocks = ModelBlocks {
        a: &vt * &fb.a * basis,
        b: fb.b.as_ref().map(|b| &vt * b),
        n: fb.n.as_ref().map(|m| &vt * m * basis),
        q: fb.q.as_ref().map(|q| &vt * mul_kron_self(q, basis)),
        c: fb.c.as_ref().map(row_times),
        d: fb.d,
        f: fb.f.as_ref().map(row_times),
        k: fb.k.as_ref().map(row_kron),
    };
    let mut model = DiscreteModel::new(blocks, full.dt, full.structure)?;
    model.basis = Some(basis.clone());
    Ok(model)
}

/// Reduces a full-order fit using the leading left singular vectors of `Xs`.
pub fn reduce<T: Scalar>(
    full: &FullOrderFit<T>,
    xs: &DMatrix<T>,
    policy_r: TruncationPolicy<T>,
) -> Result<DiscreteModel<T>> {
    let n = full.order();
    if xs.nrows() != n {
        return Err(Error::dim(format!("Xs has {} rows, model order is {n}", xs.nrows())));
    }
    if let TruncationPolicy::FixedRank(r) = policy_r {
        if r > n {
            return Err(Error::Policy(format!("reduced order {r} exceeds state dimension {n}")));
        }
    }
    let factors = truncated_svd(xs, policy_r)?;
    warn_if_clipped(policy_r, factors.rank(), "Xs");
    if factors.rank() > full.rank {
        log::warn!("reduced order {} exceeds pseudoinverse rank {}", factors.rank(), full.rank);
    }
    project(full, &factors.left)
}
