use nalgebra::{DMatrix, DVector, RowDVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::dmd::{ModelKind, ModelStructure};
use crate::error::{Error, Result};
use crate::models::{ContinuousModel, ModelBlocks, Trajectory};
use crate::Scalar;

/// Largest dense matrix (in entries) [`LiftedBilinear::to_dense`] will allocate.
pub const MAX_DENSE_ENTRIES: usize = 1 << 22;

/// Second-order Carleman lift of a quadratic-bilinear model: state `x = [v; v⊗v]`,
/// `ẋ = A x + N x u + B u`, `y = C x`. `A` and `N` are kept sparse.
#[derive(Debug, Clone)]
pub struct LiftedBilinear<T: Scalar> {
    pub a: CsrMatrix<T>,
    pub n: CsrMatrix<T>,
    pub b: DVector<T>,
    pub c: Option<RowDVector<T>>,
    /// Order of the underlying quadratic model.
    pub base_order: usize,
}

/// Lifts `v̇ = A₁v + Q₁(v⊗v) + N₁vu + B₁u` to order `n0² + n0`, dropping `v⊗v⊗v` terms:
///
/// ```text
/// A = [A₁  Q₁; 0  A₁⊗I + I⊗A₁]     N = [N₁  0; B₁⊗I + I⊗B₁  N₁⊗I + I⊗N₁]
/// B = [B₁; 0]                      C = [C₁  0]
/// ```
pub fn carleman_bilinearize<T: Scalar>(qb: &ContinuousModel<T>) -> Result<LiftedBilinear<T>> {
    let bl = &qb.blocks;
    let n0 = bl.order();
    let order = n0 + n0 * n0;
    let pair = |i: usize, j: usize| n0 + i * n0 + j;
    let zero = T::zero();

    let mut a = CooMatrix::new(order, order);
    let mut n = CooMatrix::new(order, order);
    let push = |m: &mut CooMatrix<T>, i: usize, j: usize, v: T| {
        if v != zero {
            m.push(i, j, v);
        }
    };

    for i in 0..n0 {
        for k in 0..n0 {
            let aik = bl.a[(i, k)];
            push(&mut a, i, k, aik);
            if aik != zero {
                // A₁⊗I and I⊗A₁
                for j in 0..n0 {
                    push(&mut a, pair(i, j), pair(k, j), aik);
                    push(&mut a, pair(j, i), pair(j, k), aik);
                }
            }
        }
    }
    if let Some(q) = &bl.q {
        for i in 0..n0 {
            for s in 0..n0 * n0 {
                push(&mut a, i, n0 + s, q[(i, s)]);
            }
        }
    }
    if let Some(nm) = &bl.n {
        for i in 0..n0 {
            for k in 0..n0 {
                let nik = nm[(i, k)];
                if nik != zero {
                    push(&mut n, i, k, nik);
                    for j in 0..n0 {
                        push(&mut n, pair(i, j), pair(k, j), nik);
                        push(&mut n, pair(j, i), pair(j, k), nik);
                    }
                }
            }
        }
    }
    let mut b = DVector::zeros(order);
    if let Some(b1) = &bl.b {
        b.rows_mut(0, n0).copy_from(b1);
        for i in 0..n0 {
            if b1[i] != zero {
                for j in 0..n0 {
                    push(&mut n, pair(i, j), j, b1[i]);
                    push(&mut n, pair(j, i), j, b1[i]);
                }
            }
        }
    }
    let c = bl.c.as_ref().map(|c1| {
        let mut c = RowDVector::zeros(order);
        c.columns_mut(0, n0).copy_from(c1);
        c
    });
    Ok(LiftedBilinear { a: CsrMatrix::from(&a), n: CsrMatrix::from(&n), b, c, base_order: n0 })
}

fn spmv<T: Scalar>(m: &CsrMatrix<T>, x: &DVector<T>) -> DVector<T> {
    DVector::from_iterator(
        m.nrows(),
        m.row_iter().map(|row| {
            row.col_indices()
                .iter()
                .zip(row.values())
                .fold(T::zero(), |acc, (&j, &v)| acc + v * x[j])
        }),
    )
}

fn densify<T: Scalar>(m: &CsrMatrix<T>) -> DMatrix<T> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.triplet_iter() {
        d[(i, j)] = *v;
    }
    d
}

impl<T: Scalar> LiftedBilinear<T> {
    pub fn order(&self) -> usize {
        self.b.len()
    }

    /// The lifted state `[v; v⊗v]`.
    pub fn lift_state(v: &DVector<T>) -> DVector<T> {
        let n0 = v.len();
        let mut x = DVector::zeros(n0 + n0 * n0);
        x.rows_mut(0, n0).copy_from(v);
        x.rows_mut(n0, n0 * n0).copy_from(&crate::linalg::kron_vec(v));
        x
    }

    /// `A x + N x u + B u`.
    pub fn derivative(&self, x: &DVector<T>, u: T) -> DVector<T> {
        let mut dx = spmv(&self.a, x);
        if u != T::zero() {
            dx.axpy(u, &spmv(&self.n, x), T::one());
            dx.axpy(u, &self.b, T::one());
        }
        dx
    }

    pub fn output(&self, x: &DVector<T>) -> T {
        self.c.as_ref().map_or(T::zero(), |c| c.dot(&x.transpose()))
    }

    /// Dense bilinear model (structure `BilinearIO` when an output exists).
    ///
    /// Refuses with [`Error::MemoryGuard`] when an `order²` matrix exceeds [`MAX_DENSE_ENTRIES`].
    pub fn to_dense(&self) -> Result<ContinuousModel<T>> {
        let entries = self.order() * self.order();
        if entries > MAX_DENSE_ENTRIES {
            return Err(Error::MemoryGuard { entries });
        }
        let kind = if self.c.is_some() { ModelKind::BilinearIO } else { ModelKind::Bilinear };
        let blocks = ModelBlocks {
            a: densify(&self.a),
            b: Some(self.b.clone()),
            n: Some(densify(&self.n)),
            q: None,
            c: self.c.clone(),
            d: None,
            f: None,
            k: None,
        };
        ContinuousModel::new(blocks, ModelStructure::new(kind))
    }

    /// Explicit Euler on the sparse blocks; `y_k = C x_k`.
    pub fn simulate_euler(&self, dt: T, u: &RowDVector<T>, x0: &DVector<T>) -> Result<Trajectory<T>> {
        if x0.len() != self.order() {
            return Err(Error::dim(format!(
                "initial state has length {}, lifted order is {}",
                x0.len(),
                self.order()
            )));
        }
        super::euler(|x, uk| self.derivative(x, uk), |x| self.output(x), dt, u, x0)
    }
}
