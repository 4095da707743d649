use std::ops::Range;

use nalgebra::DMatrix;

use super::ModelStructure;
use crate::error::{Error, Result};
use crate::linalg::khatri_rao_self;
use crate::snapshots::SnapshotSet;
use crate::Scalar;

/// Role of a horizontal slab of the regressor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockLabel {
    /// `X`, paired with `A` (state row) and `C` (output row)
    State,
    /// `U`, paired with `B` / `D`
    Input,
    /// `X U_D`, paired with `N` / `F`
    BilinearZ,
    /// `X ⊙ X` (column-wise `x_k ⊗ x_k`), paired with `Q` / `K`
    QuadraticT,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowBlock {
    pub label: BlockLabel,
    pub rows: Range<usize>,
}

/// Target `Γ` and regressor `Ω` of the least-squares problem `Γ ≈ G Ω`.
#[derive(Debug, Clone)]
pub struct RegressorBundle<T: Scalar> {
    pub gamma: DMatrix<T>,
    pub omega: DMatrix<T>,
    /// Row blocks of `Ω` in order `[X; U; X U_D; T]`, restricted to the structure.
    pub row_layout: Vec<RowBlock>,
    pub structure: ModelStructure,
    /// State dimension `n`; rows `0..n` of `Γ` are state rows, row `n` (if any) the output.
    pub state_dim: usize,
    pub dt: T,
}

impl<T: Scalar> RegressorBundle<T> {
    pub fn block(&self, label: BlockLabel) -> Option<&RowBlock> {
        self.row_layout.iter().find(|b| b.label == label)
    }
}

fn check_output<T: Scalar>(snap: &SnapshotSet<T>, structure: ModelStructure) -> Result<()> {
    if structure.has_output() && snap.y.is_none() {
        return Err(Error::MissingOutput(structure.to_string()));
    }
    if snap.m() < 1 {
        return Err(Error::Empty("snapshot set"));
    }
    Ok(())
}

/// `Xs` for state-only structures, `[Xs; Y]` for input-output structures.
pub fn assemble_gamma<T: Scalar>(snap: &SnapshotSet<T>, structure: ModelStructure) -> Result<DMatrix<T>> {
    check_output(snap, structure)?;
    match (&snap.y, structure.has_output()) {
        (Some(y), true) => {
            let (n, m) = (snap.n(), snap.m());
            let mut gamma = DMatrix::zeros(n + 1, m);
            gamma.rows_mut(0, n).copy_from(&snap.xs);
            gamma.row_mut(n).copy_from(y);
            Ok(gamma)
        }
        _ => Ok(snap.xs.clone()),
    }
}

/// Builds `(Γ, Ω)` for `structure`.
///
/// `X U_D` is formed by scaling column `k` of `X` by `u_k`; the quadratic block is the
/// column-wise Kronecker product of `X` with itself.
pub fn assemble_omega<T: Scalar>(snap: &SnapshotSet<T>, structure: ModelStructure) -> Result<RegressorBundle<T>> {
    let gamma = assemble_gamma(snap, structure)?;
    let (n, m) = (snap.n(), snap.m());
    let rows = structure.regressor_rows(n);
    let mut omega = DMatrix::zeros(rows, m);
    let mut layout = Vec::with_capacity(4);
    let mut at = 0;

    omega.rows_mut(at, n).copy_from(&snap.x);
    layout.push(RowBlock { label: BlockLabel::State, rows: at..at + n });
    at += n;

    if structure.has_input() {
        omega.row_mut(at).copy_from(&snap.u);
        layout.push(RowBlock { label: BlockLabel::Input, rows: at..at + 1 });
        at += 1;
    }
    if structure.has_bilinear() {
        let mut z = omega.rows_mut(at, n);
        z.copy_from(&snap.x);
        for (k, &uk) in snap.u.iter().enumerate() {
            z.column_mut(k).scale_mut(uk);
        }
        layout.push(RowBlock { label: BlockLabel::BilinearZ, rows: at..at + n });
        at += n;
    }
    if structure.has_quadratic() {
        omega.rows_mut(at, n * n).copy_from(&khatri_rao_self(&snap.x));
        layout.push(RowBlock { label: BlockLabel::QuadraticT, rows: at..at + n * n });
        at += n * n;
    }
    debug_assert_eq!(at, rows);

    Ok(RegressorBundle { gamma, omega, row_layout: layout, structure, state_dim: n, dt: snap.dt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmd::ModelKind;
    use nalgebra::RowDVector;

    fn snap(y: bool) -> SnapshotSet<f64> {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let xs = DMatrix::from_row_slice(2, 2, &[2.0, 5.0, 1.0, 3.0]);
        let u = RowDVector::from_vec(vec![3.0, 4.0]);
        let y = y.then(|| RowDVector::from_vec(vec![7.0, 8.0]));
        SnapshotSet::new(x, xs, u, y, 0.1).unwrap()
    }

    #[test]
    fn linear_regressor_is_x() {
        let s = snap(false);
        let b = assemble_omega(&s, ModelKind::Linear.into()).unwrap();
        assert_eq!(b.omega, s.x);
        assert_eq!(b.gamma, s.xs);
    }

    #[test]
    fn bilinear_hand_example() {
        let b = assemble_omega(&snap(false), ModelKind::Bilinear.into()).unwrap();
        let expected = DMatrix::from_row_slice(
            5,
            2,
            &[1.0, 2.0, 0.0, 1.0, 3.0, 4.0, 3.0, 8.0, 0.0, 4.0],
        );
        assert_eq!(b.omega, expected);
        assert_eq!(b.block(BlockLabel::BilinearZ).unwrap().rows, 3..5);
    }

    #[test]
    fn quadratic_row_count() {
        let b = assemble_omega(&snap(false), ModelKind::QuadraticBilinear.into()).unwrap();
        assert_eq!(b.omega.nrows(), 9);
        assert_eq!(b.block(BlockLabel::QuadraticT).unwrap().rows, 5..9);
        // x_0 = [1, 0] ⇒ x_0 ⊗ x_0 = [1, 0, 0, 0]
        assert_eq!(b.omega.column(0).rows(5, 4).as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn io_gamma_stacks_output() {
        let s = snap(true);
        let g = assemble_gamma(&s, ModelKind::LinearIO.into()).unwrap();
        assert_eq!(g.nrows(), 3);
        assert_eq!(g.row(2).iter().copied().collect::<Vec<_>>(), vec![7.0, 8.0]);
        assert_eq!(assemble_gamma(&s, ModelKind::Bilinear.into()).unwrap(), s.xs);
    }

    #[test]
    fn io_without_output_fails() {
        let err = assemble_omega(&snap(false), ModelKind::BilinearIO.into()).unwrap_err();
        assert!(matches!(err, Error::MissingOutput(_)));
    }
}
