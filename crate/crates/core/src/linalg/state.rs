use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::HermitianOperator;
use crate::error::{Error, Result};

/// Accepted deviation of `‖ψ‖` from one.
pub const NORM_TOL: f64 = 1e-9;

/// Normalized complex state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    /// Wraps a vector whose norm is tracked elsewhere (propagation output).
    pub(crate) fn from_raw(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|`, insensitive to the global phase of either state.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        Self {
            amplitudes: self.amplitudes.map(|a| a * C64::from_polar(1.0, phase)),
        }
    }
}

/// `Re⟨ψ|A|ψ⟩`.
///
/// The imaginary part of the quadratic form is a Hermiticity diagnostic and is
/// logged when it exceeds `1e-10`.
pub fn expectation(op: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    let w = op.apply(psi)?;
    let q = psi.amplitudes().dotc(&w);
    if q.im.abs() > 1e-10 * q.re.abs().max(1.0) {
        log::warn!("expectation value has imaginary part {:.3e}", q.im);
    }
    Ok(q.re)
}
