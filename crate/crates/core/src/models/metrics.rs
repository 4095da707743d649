use nalgebra::RowDVector;

use crate::error::{Error, Result};
use crate::Scalar;

/// `‖y_ref − y_test‖₂ / ‖y_ref‖₂`.
pub fn relative_output_error<T: Scalar>(y_ref: &RowDVector<T>, y_test: &RowDVector<T>) -> Result<T> {
    if y_ref.len() != y_test.len() {
        return Err(Error::dim(format!("signals have lengths {} and {}", y_ref.len(), y_test.len())));
    }
    let denom = y_ref.norm();
    if denom <= T::zero() {
        return Err(Error::ZeroReference);
    }
    Ok((y_ref - y_test).norm() / denom)
}

/// Pointwise `|y_ref − y_test|`.
pub fn absolute_error_series<T: Scalar>(y_ref: &RowDVector<T>, y_test: &RowDVector<T>) -> Result<RowDVector<T>> {
    if y_ref.len() != y_test.len() {
        return Err(Error::dim(format!("signals have lengths {} and {}", y_ref.len(), y_test.len())));
    }
    Ok((y_ref - y_test).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[f64]) -> RowDVector<f64> {
        RowDVector::from_row_slice(v)
    }

    #[test]
    fn hand_values() {
        let y = row(&[3.0, 4.0]);
        assert_eq!(relative_output_error(&y, &y).unwrap(), 0.0);
        assert_eq!(relative_output_error(&y, &(&y * 2.0)).unwrap(), 1.0);
        assert!((relative_output_error(&y, &row(&[3.0, 0.0])).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(absolute_error_series(&y, &row(&[3.0, 0.0])).unwrap(), row(&[0.0, 4.0]));
    }

    #[test]
    fn zero_reference_rejected() {
        assert!(matches!(relative_output_error(&row(&[0.0]), &row(&[1.0])), Err(Error::ZeroReference)));
        assert!(relative_output_error(&row(&[1.0]), &row(&[1.0, 2.0])).is_err());
    }
}
