use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, StateVector};

fn check_dims(h: &HermitianOperator, psi: &StateVector) -> Result<()> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// `⟨ψ|(H − E₀)²|ψ⟩ = ‖(H − E₀)ψ‖²`.
pub fn measure_sah(h: &HermitianOperator, e0: f64, psi: &StateVector) -> Result<f64> {
    check_dims(h, psi)?;
    let mut r = h.apply(psi)?;
    r.axpy((-e0).into(), psi.amplitudes(), 1.0.into());
    Ok(r.norm_squared())
}

/// `⟨H²⟩ − ⟨H⟩²`, evaluated as `‖(H − ⟨H⟩)ψ‖²` so it is never negative.
pub fn measure_variance(h: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    check_dims(h, psi)?;
    let mut r = h.apply(psi)?;
    let mean = psi.amplitudes().dotc(&r).re;
    r.axpy((-mean).into(), psi.amplitudes(), 1.0.into());
    Ok(r.norm_squared())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::linalg::eigensystem;
    use crate::models::{build, ModelSpec};

    #[test]
    fn eigenstates_and_superposition() {
        let m = build(&ModelSpec::new("heisenberg")).unwrap();
        let h = m.hamiltonian(&[0.4]).unwrap();
        let s = eigensystem(&h).unwrap();
        let e0 = s.ground_energy();
        let phi0 = s.eigenstate(0);
        let phi1 = s.eigenstate(1);
        let gap = s.energy(1) - e0;

        assert!(measure_sah(&h, e0, &phi0).unwrap() < 1e-20);
        assert!((measure_sah(&h, e0, &phi1).unwrap() - gap * gap).abs() < 1e-10);
        assert!(measure_variance(&h, &phi1).unwrap() < 1e-20);

        let sup = StateVector::new(
            (phi0.amplitudes() + phi1.amplitudes()) * num_complex::Complex64::from(FRAC_1_SQRT_2),
        )
        .unwrap();
        assert!((measure_sah(&h, e0, &sup).unwrap() - gap * gap / 2.0).abs() < 1e-10);
        assert!((measure_variance(&h, &sup).unwrap() - gap * gap / 4.0).abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        let h = HermitianOperator::identity(4);
        let psi = StateVector::basis(2, 0).unwrap();
        assert!(measure_sah(&h, 0.0, &psi).is_err());
        assert!(measure_variance(&h, &psi).is_err());
    }
}
