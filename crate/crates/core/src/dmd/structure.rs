use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Which terms a fitted model carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `x⁺ = A x`
    Linear,
    /// `x⁺ = A x + B u`
    LinearControl,
    /// `x⁺ = A x + B u`, `y = C x + D u`
    LinearIO,
    /// `x⁺ = A x + N x u + B u`
    Bilinear,
    /// bilinear state equation plus `y = C x + F x u + D u`
    BilinearIO,
    /// `x⁺ = A x + Q (x⊗x) + N x u + B u`
    QuadraticBilinear,
    /// quadratic-bilinear state equation plus `y = C x + K (x⊗x) + F x u + D u`
    QuadraticBilinearIO,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Linear,
        ModelKind::LinearControl,
        ModelKind::LinearIO,
        ModelKind::Bilinear,
        ModelKind::BilinearIO,
        ModelKind::QuadraticBilinear,
        ModelKind::QuadraticBilinearIO,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "Linear",
            ModelKind::LinearControl => "LinearControl",
            ModelKind::LinearIO => "LinearIO",
            ModelKind::Bilinear => "Bilinear",
            ModelKind::BilinearIO => "BilinearIO",
            ModelKind::QuadraticBilinear => "QuadraticBilinear",
            ModelKind::QuadraticBilinearIO => "QuadraticBilinearIO",
        }
    }
}

/// Fit target: the model kind plus the quadratic-output toggle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelStructure {
    pub kind: ModelKind,
    /// Only meaningful for [`ModelKind::QuadraticBilinearIO`]: fit `K (x⊗x)` in the output.
    pub include_quadratic_output: bool,
}

impl ModelStructure {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, include_quadratic_output: true }
    }

    pub fn has_input(&self) -> bool {
        self.kind != ModelKind::Linear
    }

    pub fn has_bilinear(&self) -> bool {
        matches!(
            self.kind,
            ModelKind::Bilinear
                | ModelKind::BilinearIO
                | ModelKind::QuadraticBilinear
                | ModelKind::QuadraticBilinearIO
        )
    }

    pub fn has_quadratic(&self) -> bool {
        matches!(self.kind, ModelKind::QuadraticBilinear | ModelKind::QuadraticBilinearIO)
    }

    pub fn has_output(&self) -> bool {
        matches!(
            self.kind,
            ModelKind::LinearIO | ModelKind::BilinearIO | ModelKind::QuadraticBilinearIO
        )
    }

    /// True when the output equation carries a `K (x⊗x)` term.
    pub fn has_quadratic_output(&self) -> bool {
        self.kind == ModelKind::QuadraticBilinearIO && self.include_quadratic_output
    }

    /// Rows of the regressor for state dimension `n`.
    pub fn regressor_rows(&self, n: usize) -> usize {
        let mut rows = n;
        if self.has_input() {
            rows += 1;
        }
        if self.has_bilinear() {
            rows += n;
        }
        if self.has_quadratic() {
            rows += n * n;
        }
        rows
    }
}

impl From<ModelKind> for ModelStructure {
    fn from(kind: ModelKind) -> Self {
        Self::new(kind)
    }
}

impl fmt::Display for ModelStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if self.kind == ModelKind::QuadraticBilinearIO && !self.include_quadratic_output {
            f.write_str("(no quadratic output)")?;
        }
        Ok(())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        Ok(match key.as_str() {
            "linear" | "dmd" => ModelKind::Linear,
            "linearcontrol" | "dmdc" => ModelKind::LinearControl,
            "lineario" | "iodmd" => ModelKind::LinearIO,
            "bilinear" => ModelKind::Bilinear,
            "bilineario" => ModelKind::BilinearIO,
            "quadraticbilinear" | "qb" => ModelKind::QuadraticBilinear,
            "quadraticbilineario" | "qbio" => ModelKind::QuadraticBilinearIO,
            _ => return Err(Error::Config(format!("unknown model structure '{s}'"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regressor_row_counts() {
        let n = 4;
        let rows: Vec<usize> =
            ModelKind::ALL.iter().map(|&k| ModelStructure::new(k).regressor_rows(n)).collect();
        assert_eq!(rows, vec![4, 5, 5, 9, 9, 25, 25]);
        // reference scales: Burgers lift (n = 1640) and van der Pol (n = 6)
        assert_eq!(ModelStructure::new(ModelKind::BilinearIO).regressor_rows(1640), 3281);
        assert_eq!(ModelStructure::new(ModelKind::QuadraticBilinearIO).regressor_rows(6), 49);
    }

    #[test]
    fn parse_round_trips_names() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert_eq!("qb-io".parse::<ModelKind>().unwrap(), ModelKind::QuadraticBilinearIO);
        assert!("cubic".parse::<ModelKind>().is_err());
    }
}
