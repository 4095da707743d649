use nalgebra::DMatrix;

use super::{ContinuousModel, DiscreteModel};
use crate::error::{Error, Result};
use crate::Scalar;

/// Inverts the forward-Euler map: `Â = (Ã − I)/Δt`, `B̂ = B̃/Δt`, `N̂ = Ñ/Δt`, `Q̂ = Q̃/Δt`.
///
/// Output blocks carry over unchanged.
pub fn discrete_to_continuous<T: Scalar>(model: &DiscreteModel<T>) -> Result<ContinuousModel<T>> {
    let dt = model.dt;
    if !(dt > T::zero()) {
        return Err(Error::TimeStep(dt.as_f64()));
    }
    let n = model.order();
    let inv = T::one() / dt;
    let blocks = model.blocks.map_dynamics(|a| (a - DMatrix::identity(n, n)) / dt, inv);
    Ok(ContinuousModel { blocks, structure: model.structure, basis: model.basis.clone() })
}

/// Forward-Euler discretization: `Ã = I + Δt Â`, `B̃ = Δt B̂`, `Ñ = Δt N̂`, `Q̃ = Δt Q̂`.
pub fn continuous_to_discrete<T: Scalar>(model: &ContinuousModel<T>, dt: T) -> Result<DiscreteModel<T>> {
    if !(dt > T::zero()) {
        return Err(Error::TimeStep(dt.as_f64()));
    }
    let n = model.order();
    let blocks = model.blocks.map_dynamics(|a| DMatrix::identity(n, n) + a * dt, dt);
    Ok(DiscreteModel { blocks, dt, structure: model.structure, basis: model.basis.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmd::ModelKind;
    use crate::models::ModelBlocks;
    use nalgebra::DVector;

    #[test]
    fn identity_maps_to_zero() {
        let mut blocks = ModelBlocks::linear(DMatrix::<f64>::identity(2, 2));
        blocks.b = Some(DVector::zeros(2));
        let d = DiscreteModel::new(blocks, 0.1, ModelKind::LinearControl.into()).unwrap();
        let c = discrete_to_continuous(&d).unwrap();
        assert_eq!(c.blocks.a, DMatrix::zeros(2, 2));
        assert_eq!(c.blocks.b, Some(DVector::zeros(2)));
    }

    #[test]
    fn scalar_formula() {
        let d = DiscreteModel::new(
            ModelBlocks::linear(DMatrix::from_element(1, 1, 1.05f64)),
            0.1,
            ModelKind::Linear.into(),
        )
        .unwrap();
        let c = discrete_to_continuous(&d).unwrap();
        assert!((c.blocks.a[(0, 0)] - 0.5).abs() < 1e-13);
    }

    #[test]
    fn zero_generator_gives_identity() {
        let c = ContinuousModel::new(ModelBlocks::linear(DMatrix::<f64>::zeros(3, 3)), ModelKind::Linear.into())
            .unwrap();
        let d = continuous_to_discrete(&c, 0.01).unwrap();
        assert_eq!(d.blocks.a, DMatrix::identity(3, 3));
        assert!(continuous_to_discrete(&c, -1.0).is_err());
    }

    #[test]
    fn feedthrough_is_unchanged() {
        let mut blocks = ModelBlocks::linear(DMatrix::<f64>::identity(1, 1));
        blocks.b = Some(DVector::from_element(1, 2.0));
        blocks.c = Some(nalgebra::RowDVector::from_element(1, 3.0));
        blocks.d = Some(4.0);
        let d = DiscreteModel::new(blocks.clone(), 0.5, ModelKind::LinearIO.into()).unwrap();
        let c = discrete_to_continuous(&d).unwrap();
        assert_eq!(c.blocks.c, blocks.c);
        assert_eq!(c.blocks.d, Some(4.0));
        assert_eq!(c.blocks.b.unwrap()[0], 4.0);
    }
}
