//! Parametric input signals sampled on a uniform grid.

use nalgebra::RowDVector;

use crate::Scalar;

/// Scalar input signal `u(t)` defined for `t ≥ 0`.
///
/// Frequencies are in rad/s, decay rates in 1/s.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal<T> {
    /// `amp · cos(freq t) · exp(-decay t)`
    CosineDecay { amp: T, freq: T, decay: T },
    /// `a1 · sin(f1 t) + a2 · cos(f2 t)`
    SinCosCombo { a1: T, f1: T, a2: T, f2: T },
    /// `amp · sgn(sin(freq t))` with `sgn(0) = +1`
    SquareWave { amp: T, freq: T },
    ZeroInput,
    /// Zero-order hold over pre-sampled values; the last sample is held forever.
    Custom { samples: Vec<T>, dt: T },
}

impl<T: Scalar> InputSignal<T> {
    pub fn eval(&self, t: T) -> T {
        match self {
            InputSignal::CosineDecay { amp, freq, decay } => {
                *amp * (*freq * t).cos() * (-*decay * t).exp()
            }
            InputSignal::SinCosCombo { a1, f1, a2, f2 } => {
                *a1 * (*f1 * t).sin() + *a2 * (*f2 * t).cos()
            }
            InputSignal::SquareWave { amp, freq } => {
                if (*freq * t).sin() >= T::zero() {
                    *amp
                } else {
                    -*amp
                }
            }
            InputSignal::ZeroInput => T::zero(),
            InputSignal::Custom { samples, dt } => {
                if samples.is_empty() {
                    return T::zero();
                }
                let idx = (t / *dt + T::lit(1e-9)).floor().as_f64().max(0.0) as usize;
                samples[idx.min(samples.len() - 1)]
            }
        }
    }

    /// `square(freq t) / (scale (t + 1))`, pre-sampled on the grid `k dt`.
    pub fn decaying_square(amp: T, freq: T, scale: T, dt: T, m: usize) -> Self {
        let square = InputSignal::SquareWave { amp, freq };
        let samples = (0..m)
            .map(|k| {
                let t = T::from_count(k) * dt;
                square.eval(t) / (scale * (t + T::one()))
            })
            .collect();
        InputSignal::Custom { samples, dt }
    }
}

/// Samples `sig` at `t_k = k dt` for `k = 0, …, m-1`.
pub fn sample_signal<T: Scalar>(sig: &InputSignal<T>, dt: T, m: usize) -> RowDVector<T> {
    RowDVector::from_iterator(m, (0..m).map(|k| sig.eval(T::from_count(k) * dt)))
}
