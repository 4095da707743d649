//! One-sided (Hestenes) Jacobi SVD for small square factors.

use nalgebra::DMatrix;

use crate::Scalar;

const MAX_SWEEPS: usize = 80;

/// SVD of a square matrix `r = U diag(σ) Vᵀ`, unsorted.
///
/// Columns of `r · V` are rotated pairwise until mutually orthogonal; their norms
/// are the singular values. Robust for rank-deficient input, where the left
/// vectors of (numerically) zero columns are completed to an orthonormal set.
pub(crate) fn jacobi_svd<T: Scalar>(r: &DMatrix<T>) -> (DMatrix<T>, Vec<T>, DMatrix<T>) {
    let n = r.ncols();
    let rows = r.nrows();
    let mut b: Vec<T> = r.as_slice().to_vec();
    let mut v: Vec<T> = DMatrix::<T>::identity(n, n).as_slice().to_vec();
    let eps = T::machine_eps();
    let tiny = T::zero();

    let mut norms: Vec<T> = (0..n).map(|j| dot(col(&b, rows, j), col(&b, rows, j))).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (alpha, beta) = (norms[i], norms[j]);
                if alpha <= tiny || beta <= tiny {
                    continue;
                }
                let gamma = dot(col(&b, rows, i), col(&b, rows, j));
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut b, rows, i, j, c, s);
                rotate(&mut v, n, i, j, c, s);
                norms[i] = dot(col(&b, rows, i), col(&b, rows, i));
                norms[j] = dot(col(&b, rows, j), col(&b, rows, j));
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<T> = norms.iter().map(|x| x.sqrt()).collect();
    let mut u = DMatrix::from_column_slice(rows, n, &b);
    for (j, &s) in sigma.iter().enumerate() {
        if s > tiny {
            u.column_mut(j).unscale_mut(s);
        }
    }
    (u, sigma, DMatrix::from_column_slice(n, n, &v))
}

/// Re-orthogonalizes columns in order, completing degenerate columns with
/// canonical basis vectors so the result is orthonormal.
pub(crate) fn reorthonormalize<T: Scalar>(m: &mut DMatrix<T>) {
    let (rows, cols) = m.shape();
    for j in 0..cols {
        project_out(m, j);
        let nrm = m.column(j).norm();
        if nrm > T::lit(0.5) {
            m.column_mut(j).unscale_mut(nrm);
            continue;
        }
        // Degenerate direction: restart from the canonical vector least covered so far.
        let coverage = |e: usize| (0..j).fold(T::zero(), |a, i| a + m[(e, i)] * m[(e, i)]);
        let best = (0..rows)
            .min_by(|&a, &b| coverage(a).partial_cmp(&coverage(b)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        m.column_mut(j).fill(T::zero());
        m[(best, j)] = T::one();
        project_out(m, j);
        let nrm = m.column(j).norm();
        m.column_mut(j).unscale_mut(nrm);
    }
}

/// Two passes of classical Gram-Schmidt against columns `0..j`.
fn project_out<T: Scalar>(m: &mut DMatrix<T>, j: usize) {
    for _ in 0..2 {
        for i in 0..j {
            let proj = m.column(i).dot(&m.column(j));
            let qi = m.column(i).clone_owned();
            m.column_mut(j).axpy(-proj, &qi, T::one());
        }
    }
}

#[inline]
fn col<T>(data: &[T], rows: usize, j: usize) -> &[T] {
    &data[j * rows..(j + 1) * rows]
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
fn rotate<T: Scalar>(data: &mut [T], rows: usize, i: usize, j: usize, c: T, s: T) {
    debug_assert!(i < j);
    let (head, tail) = data.split_at_mut(j * rows);
    let ci = &mut head[i * rows..(i + 1) * rows];
    let cj = &mut tail[..rows];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}
