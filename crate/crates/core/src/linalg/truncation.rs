use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::Scalar;

/// Rule for discarding trailing singular values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationPolicy<T> {
    /// Keep the leading `r` values, capped by the numerical rank.
    FixedRank(usize),
    /// Keep every `σ_i` with `σ_i / σ_1 > τ`.
    RelativeTolerance(T),
}

impl<T: Scalar> TruncationPolicy<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationPolicy::FixedRank(0) => {
                Err(Error::Policy("fixed rank must be positive".into()))
            }
            TruncationPolicy::FixedRank(_) => Ok(()),
            TruncationPolicy::RelativeTolerance(tau) => {
                if tau > T::zero() && tau < T::one() {
                    Ok(())
                } else {
                    Err(Error::Policy(format!("relative tolerance {tau} not in (0, 1)")))
                }
            }
        }
    }

    /// Relative cut at the usual numerical-rank threshold `eps * max(rows, cols)`.
    pub fn machine_precision(rows: usize, cols: usize) -> Self {
        TruncationPolicy::RelativeTolerance(T::machine_eps() * T::from_count(rows.max(cols)))
    }

    /// Number of values kept from a non-increasing spectrum of a `rows x cols` matrix.
    pub fn rank_for(&self, spectrum: &[T], rows: usize, cols: usize) -> usize {
        let Some(&lead) = spectrum.first() else {
            return 0;
        };
        if lead <= T::zero() {
            return 0;
        }
        match *self {
            TruncationPolicy::RelativeTolerance(tau) => {
                spectrum.iter().take_while(|&&s| s / lead > tau).count()
            }
            TruncationPolicy::FixedRank(r) => {
                let guard = T::machine_eps() * T::from_count(rows.max(cols));
                let numerical = spectrum.iter().take_while(|&&s| s / lead > guard).count();
                r.min(numerical)
            }
        }
    }
}

impl<T: Scalar> fmt::Display for TruncationPolicy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncationPolicy::FixedRank(r) => write!(f, "rank:{r}"),
            TruncationPolicy::RelativeTolerance(t) => write!(f, "tol:{:e}", t.as_f64()),
        }
    }
}

impl<T: Scalar> FromStr for TruncationPolicy<T> {
    type Err = Error;

    /// Accepts `rank:R`, `tol:T`, or a bare number (integer = rank, otherwise tolerance).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Policy(format!("cannot parse truncation policy '{s}'"));
        let policy = if let Some(r) = s.strip_prefix("rank:") {
            TruncationPolicy::FixedRank(r.trim().parse().map_err(|_| bad())?)
        } else if let Some(t) = s.strip_prefix("tol:") {
            let v: f64 = t.trim().parse().map_err(|_| bad())?;
            TruncationPolicy::RelativeTolerance(T::lit(v))
        } else if let Ok(r) = s.parse::<usize>() {
            TruncationPolicy::FixedRank(r)
        } else {
            let v: f64 = s.parse().map_err(|_| bad())?;
            TruncationPolicy::RelativeTolerance(T::lit(v))
        };
        policy.validate()?;
        Ok(policy)
    }
}
