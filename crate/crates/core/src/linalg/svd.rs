use nalgebra::{DMatrix, DVector};

use super::jacobi::{jacobi_svd, reorthonormalize};
use super::TruncationPolicy;
use crate::error::{Error, Result};
use crate::Scalar;

/// Leading singular triplets of a matrix `M ≈ left · diag(σ) · rightᵀ`.
#[derive(Debug, Clone)]
pub struct SvdFactors<T: Scalar> {
    /// `rows x k`, orthonormal columns.
    pub left: DMatrix<T>,
    /// Length `k`, non-increasing.
    pub singular_values: DVector<T>,
    /// `cols x k`, orthonormal columns.
    pub right: DMatrix<T>,
    /// Every singular value of the source, before truncation.
    pub spectrum: Vec<T>,
}

impl<T: Scalar> SvdFactors<T> {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// Shape of the factored matrix.
    pub fn source_shape(&self) -> (usize, usize) {
        (self.left.nrows(), self.right.nrows())
    }

    /// Full spectrum divided by its leading value.
    pub fn normalized_spectrum(&self) -> Vec<T> {
        normalize(&self.spectrum)
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        let mut scaled = self.left.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*s);
        }
        scaled * self.right.transpose()
    }
}

pub(crate) fn normalize<T: Scalar>(spectrum: &[T]) -> Vec<T> {
    match spectrum.first() {
        Some(&lead) if lead > T::zero() => spectrum.iter().map(|&s| s / lead).collect(),
        _ => spectrum.to_vec(),
    }
}

/// Thin SVD `(U, σ, V)` sorted by decreasing σ, without truncation or sign fixing.
///
/// The matrix is oriented tall and compressed by a column-pivoted Householder QR.
/// Trailing rows of `R` whose combined norm is below roundoff are discarded, so
/// the Jacobi stage only sees a square factor of the numerical rank. The returned
/// spectrum is padded with zeros up to `min(rows, cols)`.
fn thin_svd<T: Scalar>(m: &DMatrix<T>) -> (DMatrix<T>, Vec<T>, DMatrix<T>) {
    let transposed = m.nrows() < m.ncols();
    let a = if transposed { m.transpose() } else { m.clone() };
    let full = a.ncols();

    // A P = Q R
    let qr = a.col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let perm = qr.p();
    let k = numerical_row_count(&r);
    if k == 0 {
        return (DMatrix::zeros(q.nrows(), 0), vec![T::zero(); full], DMatrix::zeros(full, 0));
    }

    // S = R_k Pᵀ so that A ≈ Q_k S.
    let mut s = r.rows(0, k).into_owned();
    perm.inv_permute_columns(&mut s);

    // Sᵀ = Q2 R2, R2 = U2 Σ V2ᵀ  ⇒  S = V2 Σ (Q2 U2)ᵀ.
    let qr2 = s.transpose().qr();
    let (q2, r2) = (qr2.q(), qr2.r());
    let (u2, sigma, v2) = jacobi_svd(&r2);
    let (mut u2s, sigma, v2s) = sort_descending(u2, sigma, v2);
    reorthonormalize(&mut u2s);

    let left_a = q.columns(0, k) * v2s;
    let right_a = q2 * u2s;
    let mut spectrum = sigma;
    spectrum.resize(full, T::zero());
    if transposed {
        (right_a, spectrum, left_a)
    } else {
        (left_a, spectrum, right_a)
    }
}

/// Smallest `k` such that the trailing block `R[k.., k..]` is below roundoff.
fn numerical_row_count<T: Scalar>(r: &DMatrix<T>) -> usize {
    let rows = r.nrows().min(r.ncols());
    let mut tail = vec![T::zero(); rows + 1];
    for i in (0..rows).rev() {
        let row_sq = r.row(i).columns(i, r.ncols() - i).norm_squared();
        tail[i] = tail[i + 1] + row_sq;
    }
    let total = tail[0];
    if total <= T::zero() {
        return 0;
    }
    let eps = T::machine_eps();
    let threshold = eps * eps * total;
    (0..=rows).find(|&k| tail[k] <= threshold).unwrap_or(rows)
}

fn sort_descending<T: Scalar>(
    u: DMatrix<T>,
    s: Vec<T>,
    v: DMatrix<T>,
) -> (DMatrix<T>, Vec<T>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let v_sorted = DMatrix::from_fn(v.nrows(), order.len(), |i, j| v[(i, order[j])]);
    let s_sorted = order.iter().map(|&j| s[j]).collect();
    (u_sorted, s_sorted, v_sorted)
}

/// Flips each singular pair so the first non-negligible entry of the left vector is positive.
fn fix_signs<T: Scalar>(left: &mut DMatrix<T>, right: &mut DMatrix<T>) {
    let negligible = T::machine_eps().sqrt();
    for j in 0..left.ncols() {
        let col = left.column(j);
        let peak = col.amax();
        let pivot = col.iter().copied().find(|x| x.abs() > negligible * peak);
        if matches!(pivot, Some(p) if p < T::zero()) {
            left.column_mut(j).neg_mut();
            right.column_mut(j).neg_mut();
        }
    }
}

/// Every singular value of `m`, non-increasing, `min(rows, cols)` entries.
pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Vec<T> {
    if m.is_empty() {
        return Vec::new();
    }
    thin_svd(m).1
}

/// Singular value decomposition truncated according to `policy`.
pub fn truncated_svd<T: Scalar>(m: &DMatrix<T>, policy: TruncationPolicy<T>) -> Result<SvdFactors<T>> {
    if m.is_empty() {
        return Err(Error::Empty("truncated_svd input"));
    }
    policy.validate()?;
    let (rows, cols) = m.shape();
    let (u, spectrum, v) = thin_svd(m);
    let k = policy.rank_for(&spectrum, rows, cols);
    if k == 0 {
        return Err(Error::Singular);
    }
    let mut left = u.columns(0, k).into_owned();
    let mut right = v.columns(0, k).into_owned();
    fix_signs(&mut left, &mut right);
    Ok(SvdFactors {
        left,
        singular_values: DVector::from_iterator(k, spectrum.iter().take(k).copied()),
        right,
        spectrum,
    })
}

/// Forms `target · W Σ⁻¹ Vᵀ`, i.e. `target` times the truncated pseudoinverse of
/// the factored matrix, without materializing the pseudoinverse itself.
pub fn pinv_apply<T: Scalar>(factors: &SvdFactors<T>, target: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (_, source_cols) = factors.source_shape();
    if target.ncols() != source_cols {
        return Err(Error::dim(format!(
            "target has {} columns but the factored matrix has {}",
            target.ncols(),
            source_cols
        )));
    }
    let mut projected = target * &factors.right;
    for (j, s) in factors.singular_values.iter().enumerate() {
        projected.column_mut(j).unscale_mut(*s);
    }
    Ok(projected * factors.left.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).norm() <= tol
    }

    fn gram_is_identity(m: &DMatrix<f64>) -> bool {
        let g = m.transpose() * m;
        close(&g, &DMatrix::identity(g.nrows(), g.ncols()), 1e-10)
    }

    #[test]
    fn identity_keeps_everything() {
        let f = truncated_svd(&DMatrix::<f64>::identity(3, 3), TruncationPolicy::RelativeTolerance(1e-12)).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(f.singular_values.iter().all(|&s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn tolerance_cut_on_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0f64, 2.0, 3e-13]));
        let f = truncated_svd(&m, TruncationPolicy::RelativeTolerance(1e-10)).unwrap();
        assert_eq!(f.rank(), 2);
        assert!((f.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((f.singular_values[1] - 2.0).abs() < 1e-14);
        assert_eq!(f.spectrum.len(), 3);
    }

    #[test]
    fn wide_and_tall_paths_are_orthonormal() {
        for (r, c) in [(4, 30), (30, 4), (6, 7)] {
            let m = DMatrix::from_fn(r, c, |i, j| ((i * 7 + j * 3) as f64 * 0.37).sin() + 0.1 * j as f64);
            let f = truncated_svd(&m, TruncationPolicy::FixedRank(r.min(c))).unwrap();
            assert!(gram_is_identity(&f.left));
            assert!(gram_is_identity(&f.right));
            let err = (f.reconstruct() - &m).norm(); assert!(err <= 1e-10 * m.norm(), "{r}x{c}: {err} {:?}", f.spectrum);
            assert!(f.singular_values.as_slice().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn sign_convention_makes_leading_entry_positive() {
        let m = DMatrix::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, -1.0]);
        let f = truncated_svd(&m, TruncationPolicy::FixedRank(2)).unwrap();
        assert!(f.left[(0, 0)] > 0.0 && f.left[(1, 1)] > 0.0);
        assert!(close(&f.reconstruct(), &m, 1e-14));
    }

    #[test]
    fn empty_and_zero_inputs_fail() {
        let empty = DMatrix::<f64>::zeros(0, 3);
        assert!(matches!(truncated_svd(&empty, TruncationPolicy::FixedRank(1)), Err(Error::Empty(_))));
        let zero = DMatrix::<f64>::zeros(3, 3);
        assert!(matches!(truncated_svd(&zero, TruncationPolicy::FixedRank(1)), Err(Error::Singular)));
        let id = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(
            truncated_svd(&id, TruncationPolicy::RelativeTolerance(1.5)),
            Err(Error::Policy(_))
        ));
    }

    #[test]
    fn pinv_of_identity_and_diagonal() {
        let id = DMatrix::<f64>::identity(3, 3);
        let f = truncated_svd(&id, TruncationPolicy::FixedRank(3)).unwrap();
        assert!(close(&pinv_apply(&f, &id).unwrap(), &id, 1e-15));

        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0]));
        let f = truncated_svd(&d, TruncationPolicy::FixedRank(2)).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.25]));
        assert!(close(&pinv_apply(&f, &DMatrix::identity(2, 2)).unwrap(), &expected, 1e-15));
    }

    #[test]
    fn pinv_rejects_mismatched_target() {
        let f = truncated_svd(&DMatrix::<f64>::identity(3, 3), TruncationPolicy::FixedRank(3)).unwrap();
        assert!(matches!(pinv_apply(&f, &DMatrix::zeros(2, 4)), Err(Error::Dimension(_))));
    }

    #[test]
    fn single_precision_works() {
        let m = DMatrix::<f32>::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0]);
        let f = truncated_svd(&m, TruncationPolicy::FixedRank(2)).unwrap();
        assert!((f.reconstruct() - &m).norm() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn low_rank() -> impl Strategy<Value = DMatrix<f64>> {
            (1usize..12, 1usize..12, 1usize..6).prop_flat_map(|(r, c, k)| {
                let k = k.min(r).min(c);
                (
                    proptest::collection::vec(-1.0f64..1.0, r * k),
                    proptest::collection::vec(-1.0f64..1.0, k * c),
                )
                    .prop_map(move |(a, b)| {
                        DMatrix::from_vec(r, k, a) * DMatrix::from_vec(k, c, b)
                    })
            })
        }

        proptest! {
            #[test]
            fn rank_deficient_reconstruction(m in low_rank()) {
                prop_assume!(m.norm() > 1e-6);
                let f = truncated_svd(&m, TruncationPolicy::FixedRank(m.nrows().min(m.ncols()))).unwrap();
                let err = (f.reconstruct() - &m).norm();
                prop_assert!(err <= 1e-12 * m.norm(), "err {}", err);
                prop_assert!(gram_is_identity(&f.left));
                prop_assert!(gram_is_identity(&f.right));
            }

            #[test]
            fn transpose_has_same_spectrum(m in low_rank()) {
                let a = thin_svd(&m).1;
                let b = thin_svd(&m.transpose()).1;
                prop_assert_eq!(a.len(), b.len());
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() <= 1e-12 * a[0].max(1.0));
                }
            }
        }
    }
}
