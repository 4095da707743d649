use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Scalar;

/// Eigenpairs of a fitted state matrix.
#[derive(Debug, Clone)]
pub struct DmdModes<T: Scalar> {
    /// Sorted by decreasing modulus; complex pairs adjacent, positive imaginary part first.
    pub eigenvalues: Vec<Complex<T>>,
    /// Unit-norm eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: DMatrix<Complex<T>>,
}

/// Eigenvalues from the real Schur form, eigenvectors by shifted inverse iteration.
pub fn compute_dmd_modes<T: Scalar>(a: &DMatrix<T>) -> Result<DmdModes<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::dim(format!("DMD modes need a square matrix, got {:?}", a.shape())));
    }
    if n == 0 {
        return Err(Error::Empty("state matrix"));
    }
    let mut eigenvalues: Vec<Complex<T>> = a.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|x, y| {
        let key = |z: &Complex<T>| (modulus(*z), z.re, z.im);
        let (a, b) = (key(x), key(y));
        b.partial_cmp(&a).unwrap_or(std::cmp::Ordering::Equal)
    });

    let ac: DMatrix<Complex<T>> = a.map(|v| Complex::new(v, T::zero()));
    let scale = a.amax().max(T::one());
    let mut vectors: DMatrix<Complex<T>> = DMatrix::zeros(n, n);
    for (j, &lambda) in eigenvalues.iter().enumerate() {
        let peers: Vec<usize> = (0..j)
            .filter(|&i| modulus(eigenvalues[i] - lambda) <= T::lit(1e-8) * scale)
            .collect();
        let v = inverse_iteration(&ac, lambda, j, scale, &vectors, &peers);
        vectors.set_column(j, &v);
    }
    Ok(DmdModes { eigenvalues, eigenvectors: vectors })
}

fn inverse_iteration<T: Scalar>(
    a: &DMatrix<Complex<T>>,
    lambda: Complex<T>,
    index: usize,
    scale: T,
    previous: &DMatrix<Complex<T>>,
    peers: &[usize],
) -> DVector<Complex<T>> {
    let n = a.nrows();
    let mut shift_size = T::lit(1e-10) * scale;
    let mut v: DVector<Complex<T>> = DVector::from_fn(n, |i, _| {
        let phase = T::from_count((i * 7 + index * 13) % 17 + 1);
        Complex::new(T::one() / phase, T::zero())
    });
    for _ in 0..6 {
        let shifted = a - DMatrix::from_diagonal_element(n, n, lambda + Complex::new(shift_size, T::zero()));
        let lu = shifted.lu();
        let mut ok = true;
        for _ in 0..3 {
            orthogonalize(&mut v, previous, peers);
            match lu.solve(&v) {
                Some(w) if w.iter().all(|z| z.re.finite() && z.im.finite()) => {
                    let nrm = w.norm();
                    v = w.unscale(nrm);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            orthogonalize(&mut v, previous, peers);
            let nrm = v.norm();
            if nrm > T::zero() {
                v.unscale_mut(nrm);
            }
            return normalize_phase(v);
        }
        shift_size *= T::lit(1e3);
    }
    normalize_phase(v)
}

fn modulus<T: Scalar>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

fn orthogonalize<T: Scalar>(v: &mut DVector<Complex<T>>, basis: &DMatrix<Complex<T>>, peers: &[usize]) {
    for &i in peers {
        let q = basis.column(i);
        let proj = q.dotc(v);
        v.axpy(-proj, &q, Complex::new(T::one(), T::zero()));
    }
}

/// Rotates so the largest-modulus component is real and positive.
fn normalize_phase<T: Scalar>(v: DVector<Complex<T>>) -> DVector<Complex<T>> {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| modulus(*a).partial_cmp(&modulus(*b)).unwrap_or(std::cmp::Ordering::Equal));
    match pivot {
        Some(p) if modulus(p) > T::zero() => {
            let rot = p.conj() / Complex::new(modulus(p), T::zero());
            v.map(|z| z * rot)
        }
        _ => v,
    }
}
