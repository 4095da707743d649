use nalgebra::{DMatrix, DVector, RowDVector};

use crate::dmd::ModelStructure;
use crate::error::{Error, Result};
use crate::Scalar;

/// Coefficient blocks of a structured model. Absent blocks act as zero.
///
/// State equation: `A x + Q (x⊗x) + N x u + B u`.
/// Output equation: `C x + K (x⊗x) + F x u + D u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBlocks<T: Scalar> {
    pub a: DMatrix<T>,
    pub b: Option<DVector<T>>,
    pub n: Option<DMatrix<T>>,
    pub q: Option<DMatrix<T>>,
    pub c: Option<RowDVector<T>>,
    pub d: Option<T>,
    pub f: Option<RowDVector<T>>,
    pub k: Option<RowDVector<T>>,
}

impl<T: Scalar> ModelBlocks<T> {
    /// Only `A` present.
    pub fn linear(a: DMatrix<T>) -> Self {
        Self { a, b: None, n: None, q: None, c: None, d: None, f: None, k: None }
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn has_output(&self) -> bool {
        self.c.is_some() || self.d.is_some() || self.f.is_some() || self.k.is_some()
    }

    /// Checks block shapes and that no block is present that `structure` excludes.
    pub fn validate(&self, structure: &ModelStructure) -> Result<()> {
        let n = self.order();
        if self.a.ncols() != n || n == 0 {
            return Err(Error::dim(format!("A must be square and non-empty, got {:?}", self.a.shape())));
        }
        let shape = |name: &str, got: (usize, usize), want: (usize, usize)| {
            if got == want {
                Ok(())
            } else {
                Err(Error::dim(format!("{name} is {got:?}, expected {want:?}")))
            }
        };
        let forbid = |name: &str, present: bool, allowed: bool| {
            if present && !allowed {
                Err(Error::dim(format!("{name} block not allowed for structure {structure}")))
            } else {
                Ok(())
            }
        };
        if let Some(b) = &self.b {
            shape("B", b.shape(), (n, 1))?;
        }
        if let Some(m) = &self.n {
            shape("N", m.shape(), (n, n))?;
        }
        if let Some(q) = &self.q {
            shape("Q", q.shape(), (n, n * n))?;
        }
        if let Some(c) = &self.c {
            shape("C", c.shape(), (1, n))?;
        }
        if let Some(f) = &self.f {
            shape("F", f.shape(), (1, n))?;
        }
        if let Some(k) = &self.k {
            shape("K", k.shape(), (1, n * n))?;
        }
        forbid("B", self.b.is_some(), structure.has_input())?;
        forbid("N", self.n.is_some(), structure.has_bilinear())?;
        forbid("Q", self.q.is_some(), structure.has_quadratic())?;
        forbid("C", self.c.is_some(), structure.has_output())?;
        forbid("D", self.d.is_some(), structure.has_output() && structure.has_input())?;
        forbid("F", self.f.is_some(), structure.has_output() && structure.has_bilinear())?;
        forbid("K", self.k.is_some(), structure.has_quadratic_output())?;
        Ok(())
    }

    /// Applies `f` to every dynamics block (`A`, `B`, `N`, `Q`); output blocks are kept.
    pub(crate) fn map_dynamics(
        &self,
        a: impl FnOnce(&DMatrix<T>) -> DMatrix<T>,
        scale: T,
    ) -> Self {
        Self {
            a: a(&self.a),
            b: self.b.as_ref().map(|b| b * scale),
            n: self.n.as_ref().map(|m| m * scale),
            q: self.q.as_ref().map(|q| q * scale),
            c: self.c.clone(),
            d: self.d,
            f: self.f.clone(),
            k: self.k.clone(),
        }
    }
}

/// Discrete-time structured model `x_{k+1} = A x_k + Q (x_k⊗x_k) + N x_k u_k + B u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel<T: Scalar> {
    pub blocks: ModelBlocks<T>,
    pub dt: T,
    pub structure: ModelStructure,
    /// Projection basis `V̂` (full order x reduced order), when the model was reduced.
    pub basis: Option<DMatrix<T>>,
}

/// Continuous-time structured model `ẋ = A x + Q (x⊗x) + N x u + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousModel<T: Scalar> {
    pub blocks: ModelBlocks<T>,
    pub structure: ModelStructure,
    pub basis: Option<DMatrix<T>>,
}

impl<T: Scalar> DiscreteModel<T> {
    pub fn new(blocks: ModelBlocks<T>, dt: T, structure: ModelStructure) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::TimeStep(dt.as_f64()));
        }
        blocks.validate(&structure)?;
        Ok(Self { blocks, dt, structure, basis: None })
    }

    pub fn order(&self) -> usize {
        self.blocks.order()
    }

    /// Reduced initial state `V̂ᵀ x0` (identity when no basis is attached).
    pub fn project_state(&self, x0: &DVector<T>) -> DVector<T> {
        match &self.basis {
            Some(v) => v.transpose() * x0,
            None => x0.clone(),
        }
    }

    /// Lifts reduced states back to full coordinates via `V̂`.
    pub fn lift_states(&self, states: &DMatrix<T>) -> DMatrix<T> {
        match &self.basis {
            Some(v) => v * states,
            None => states.clone(),
        }
    }
}

impl<T: Scalar> ContinuousModel<T> {
    pub fn new(blocks: ModelBlocks<T>, structure: ModelStructure) -> Result<Self> {
        blocks.validate(&structure)?;
        Ok(Self { blocks, structure, basis: None })
    }

    pub fn order(&self) -> usize {
        self.blocks.order()
    }

    /// Right-hand side `A x + Q (x⊗x) + N x u + B u`.
    pub fn derivative(&self, x: &DVector<T>, u: T) -> DVector<T> {
        super::simulate::state_update(&self.blocks, x, u)
    }

    /// Output `C x + K (x⊗x) + F x u + D u`, or `None` without output blocks.
    pub fn output(&self, x: &DVector<T>, u: T) -> Option<T> {
        super::simulate::output_map(&self.blocks, x, u)
    }
}
