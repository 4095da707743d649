use nalgebra::{DMatrix, DVector};

use crate::Scalar;

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == T::zero() {
                continue;
            }
            let mut block = out.view_mut((i * br, j * bc), (br, bc));
            block.zip_apply(b, |o, v| *o = s * v);
        }
    }
    out
}

/// `x ⊗ x` for a vector, entry `i * n + j` equal to `x_i x_j`.
pub fn kron_vec<T: Scalar>(x: &DVector<T>) -> DVector<T> {
    let n = x.len();
    DVector::from_fn(n * n, |idx, _| x[idx / n] * x[idx % n])
}

/// Column-wise self Kronecker product: column `k` of the result is `x_k ⊗ x_k`.
///
/// Equal to `(X ⊗ X) H` with `H = [e_1⊗e_1, …, e_m⊗e_m]`, but built one column at a
/// time so the `n² x m²` intermediate is never formed.
pub fn khatri_rao_self<T: Scalar>(x: &DMatrix<T>) -> DMatrix<T> {
    let (n, m) = x.shape();
    let mut out = DMatrix::zeros(n * n, m);
    for k in 0..m {
        let col = x.column(k);
        let mut dst = out.column_mut(k);
        for i in 0..n {
            let xi = col[i];
            for j in 0..n {
                dst[i * n + j] = xi * col[j];
            }
        }
    }
    out
}

/// `q · (v ⊗ v)` for `q: rows x n²` and `v: n x r`, without forming `v ⊗ v`.
///
/// Row `i` of `q` is read as the `n x n` coefficient matrix `M_i` of `x⊗x`; the
/// corresponding output row is `vᵀ M_i v` flattened row-major.
pub fn mul_kron_self<T: Scalar>(q: &DMatrix<T>, v: &DMatrix<T>) -> DMatrix<T> {
    let (n, r) = v.shape();
    assert_eq!(q.ncols(), n * n, "quadratic block must have n² columns");
    let vt = v.transpose();
    let mut out = DMatrix::zeros(q.nrows(), r * r);
    for i in 0..q.nrows() {
        let coeffs = DMatrix::from_fn(n, n, |j, l| q[(i, j * n + l)]);
        let w = &vt * coeffs * v;
        for a in 0..r {
            for b in 0..r {
                out[(i, a * r + b)] = w[(a, b)];
            }
        }
    }
    out
}
