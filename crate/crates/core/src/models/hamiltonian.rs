use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, SparseOperator};

pub type CoeffFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64], usize) -> f64 + Send + Sync>;

/// One Hermitian operator scaled by a real function of the parameters.
#[derive(Clone)]
pub struct Term {
    pub label: String,
    pub op: SparseOperator,
    coeff: CoeffFn,
    grad: Option<GradFn>,
}

impl Term {
    pub fn constant(label: impl Into<String>, op: SparseOperator, value: f64) -> Self {
        Self {
            label: label.into(),
            op,
            coeff: Arc::new(move |_| value),
            grad: Some(Arc::new(|_, _| 0.0)),
        }
    }

    /// A term whose coefficient has a known gradient.
    pub fn smooth(
        label: impl Into<String>,
        op: SparseOperator,
        coeff: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            op,
            coeff: Arc::new(coeff),
            grad: Some(Arc::new(grad)),
        }
    }

    /// A term differentiated numerically.
    pub fn opaque(
        label: impl Into<String>,
        op: SparseOperator,
        coeff: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            op,
            coeff: Arc::new(coeff),
            grad: None,
        }
    }

    pub fn coefficient(&self, params: &[f64]) -> f64 {
        (self.coeff)(params)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Term")
            .field("label", &self.label)
            .field("nnz", &self.op.nnz())
            .field("analytic_gradient", &self.grad.is_some())
            .finish()
    }
}

/// `H(λ) = Σ_a c_a(λ) O_a` with fixed sparse `O_a`.
#[derive(Clone, Debug)]
pub struct ParametricHamiltonian {
    dim: usize,
    terms: Vec<Term>,
}

impl ParametricHamiltonian {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.op.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: t.op.dim(),
            });
        }
        Ok(Self { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, term: Term) -> Result<()> {
        if term.op.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: term.op.dim(),
            });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn coefficients(&self, params: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient(params)).collect()
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.terms.iter().all(|t| t.grad.is_some())
    }

    /// `y = H x` for coefficients from [`Self::coefficients`].
    pub fn apply(&self, coeffs: &[f64], x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (t, &c) in self.terms.iter().zip(coeffs) {
            if c != 0.0 {
                t.op.apply_scaled_add(c, x, y);
            }
        }
    }

    pub fn dense_from_coefficients(&self, coeffs: &[f64]) -> Result<HermitianOperator> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (t, &c) in self.terms.iter().zip(coeffs) {
            if c != 0.0 {
                t.op.add_scaled_into(c, &mut m);
            }
        }
        HermitianOperator::new(m)
    }

    pub fn dense(&self, params: &[f64]) -> Result<HermitianOperator> {
        self.dense_from_coefficients(&self.coefficients(params))
    }

    /// `∂H/∂λ_which` from the coefficient gradients, if all terms provide one.
    pub fn analytic_derivative(
        &self,
        params: &[f64],
        which: usize,
    ) -> Option<Result<HermitianOperator>> {
        let grads: Option<Vec<f64>> = self
            .terms
            .iter()
            .map(|t| t.grad.as_ref().map(|g| g(params, which)))
            .collect();
        grads.map(|g| self.dense_from_coefficients(&g))
    }

    /// `∂H/∂λ_which` term by term: exact where a gradient is known, otherwise
    /// a central difference of the scalar coefficient with step `step`.
    /// Constant terms contribute exactly zero.
    pub fn derivative(&self, params: &[f64], which: usize, step: f64) -> Result<HermitianOperator> {
        let mut plus = params.to_vec();
        let mut minus = params.to_vec();
        plus[which] += step;
        minus[which] -= step;
        let width = plus[which] - minus[which];
        let grads: Vec<f64> = self
            .terms
            .iter()
            .map(|t| match &t.grad {
                Some(g) => g(params, which),
                None => (t.coefficient(&plus) - t.coefficient(&minus)) / width,
            })
            .collect();
        self.dense_from_coefficients(&grads)
    }
}
