use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::krylov::KrylovStepper;
use crate::error::{Error, Result};
use crate::linalg::eigensystem;
use crate::models::ParametricHamiltonian;

/// Largest dimension for which `auto` picks the dense eigendecomposition
/// stepper; larger spaces go to Krylov.
pub const AUTO_DENSE_MAX_DIM: usize = 32;

/// A way of applying `exp(−i·H·dt)` for one step.
pub trait Stepper: Send + Sync {
    fn name(&self) -> &'static str;

    /// Per-evolution kernel; may hold scratch space.
    fn kernel<'h>(&self, hamiltonian: &'h ParametricHamiltonian) -> Box<dyn StepKernel + 'h>;
}

pub trait StepKernel {
    /// `psi ← exp(−i·H(coeffs)·dt) psi`.
    fn step(&mut self, coeffs: &[f64], dt: f64, psi: &mut DVector<C64>) -> Result<()>;
}

/// Dense midpoint propagator: diagonalize `H`, exponentiate the eigenvalues.
#[derive(Clone, Copy, Debug, Default)]
pub struct EigenStepper;

struct EigenKernel<'h> {
    hamiltonian: &'h ParametricHamiltonian,
}

impl Stepper for EigenStepper {
    fn name(&self) -> &'static str {
        "eigen"
    }

    fn kernel<'h>(&self, hamiltonian: &'h ParametricHamiltonian) -> Box<dyn StepKernel + 'h> {
        Box::new(EigenKernel { hamiltonian })
    }
}

impl StepKernel for EigenKernel<'_> {
    fn step(&mut self, coeffs: &[f64], dt: f64, psi: &mut DVector<C64>) -> Result<()> {
        let h = self.hamiltonian.dense_from_coefficients(coeffs)?;
        let spectrum = eigensystem(&h)?;
        let v = spectrum.eigenvectors();
        let mut c = v.ad_mul(psi);
        for (ci, &e) in c.iter_mut().zip(spectrum.energies()) {
            *ci *= C64::from_polar(1.0, -e * dt);
        }
        v.mul_to(&c, psi);
        Ok(())
    }
}

/// Name → stepper lookup; `auto` is resolved by dimension.
#[derive(Clone)]
pub struct StepperRegistry {
    steppers: BTreeMap<&'static str, Arc<dyn Stepper>>,
}

impl Default for StepperRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl StepperRegistry {
    pub fn builtin() -> Self {
        let mut r = Self {
            steppers: BTreeMap::new(),
        };
        r.register(Arc::new(EigenStepper));
        r.register(Arc::new(KrylovStepper::default()));
        r
    }

    pub fn register(&mut self, stepper: Arc<dyn Stepper>) {
        self.steppers.insert(stepper.name(), stepper);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.steppers.keys().copied()
    }

    pub fn resolve(&self, name: &str, dim: usize) -> Result<Arc<dyn Stepper>> {
        let name = match name {
            "auto" if dim <= AUTO_DENSE_MAX_DIM => "eigen",
            "auto" => "krylov",
            other => other,
        };
        self.steppers
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Unknown {
                kind: "stepper",
                name: name.to_string(),
            })
    }
}
