//! Lanczos approximation of `exp(−i·H·dt)·ψ` using only products with the
//! sparse Hamiltonian terms.
//!
//! The Krylov basis is fully reorthogonalized and the small tridiagonal
//! exponential is taken through its eigendecomposition, so the update is
//! unitary to rounding no matter where the expansion is truncated. The
//! truncation error estimate is the usual `β_m |e_mᵀ exp(−iT dt) e₁|`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::stepper::{StepKernel, Stepper};
use crate::error::{Error, Result};
use crate::models::ParametricHamiltonian;

#[derive(Clone, Copy, Debug)]
pub struct KrylovStepper {
    /// Largest Krylov dimension before the step is split in two.
    pub max_dim: usize,
    /// Truncation tolerance relative to `‖ψ‖`.
    pub tol: f64,
}

impl Default for KrylovStepper {
    fn default() -> Self {
        Self {
            max_dim: 40,
            tol: 1e-13,
        }
    }
}

impl Stepper for KrylovStepper {
    fn name(&self) -> &'static str {
        "krylov"
    }

    fn kernel<'h>(&self, hamiltonian: &'h ParametricHamiltonian) -> Box<dyn StepKernel + 'h> {
        let dim = hamiltonian.dim();
        let m = self.max_dim.min(dim).max(1);
        Box::new(KrylovKernel {
            hamiltonian,
            max_dim: m,
            tol: self.tol,
            basis: (0..=m).map(|_| DVector::zeros(dim)).collect(),
            w: DVector::zeros(dim),
        })
    }
}

struct KrylovKernel<'h> {
    hamiltonian: &'h ParametricHamiltonian,
    max_dim: usize,
    tol: f64,
    basis: Vec<DVector<C64>>,
    w: DVector<C64>,
}

/// `exp(−i T dt) e₁` for the symmetric tridiagonal `T` given by `alpha`, `beta`.
fn tridiagonal_exp_e1(alpha: &[f64], beta: &[f64], dt: f64) -> DVector<C64> {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let q = &eig.eigenvectors;
    DVector::from_fn(k, |i, _| {
        (0..k)
            .map(|j| C64::from_polar(q[(i, j)] * q[(0, j)], -eig.eigenvalues[j] * dt))
            .sum()
    })
}

impl KrylovKernel<'_> {
    fn try_step(&mut self, coeffs: &[f64], dt: f64, psi: &mut DVector<C64>) -> Result<bool> {
        let beta0 = psi.norm();
        if beta0 == 0.0 {
            return Ok(true);
        }
        self.basis[0].copy_from(psi);
        self.basis[0].unscale_mut(beta0);

        let mut alpha = Vec::with_capacity(self.max_dim);
        let mut beta: Vec<f64> = Vec::with_capacity(self.max_dim);
        let mut scale = 0.0_f64;

        for j in 0..self.max_dim {
            self.hamiltonian
                .apply(coeffs, self.basis[j].as_slice(), self.w.as_mut_slice());
            let a = self.basis[j].dotc(&self.w).re;
            alpha.push(a);
            scale = scale.max(a.abs());
            // Two Gram-Schmidt passes against the whole basis.
            for _ in 0..2 {
                for i in 0..=j {
                    let proj = self.basis[i].dotc(&self.w);
                    self.w.axpy(-proj, &self.basis[i], C64::new(1.0, 0.0));
                }
            }
            let b = self.w.norm();
            scale = scale.max(b);

            let breakdown = b <= 1e-14 * scale.max(f64::MIN_POSITIVE);
            let y = tridiagonal_exp_e1(&alpha, &beta, dt);
            let err = b * y[j].norm();
            if breakdown || err <= self.tol || j + 1 == self.hamiltonian.dim() {
                psi.fill(C64::new(0.0, 0.0));
                for (i, yi) in y.iter().enumerate() {
                    psi.axpy(*yi * beta0, &self.basis[i], C64::new(1.0, 0.0));
                }
                return Ok(true);
            }
            beta.push(b);
            self.basis[j + 1].copy_from(&self.w);
            self.basis[j + 1].unscale_mut(b);
        }
        Ok(false)
    }

    fn step_split(
        &mut self,
        coeffs: &[f64],
        dt: f64,
        psi: &mut DVector<C64>,
        depth: u32,
    ) -> Result<()> {
        if self.try_step(coeffs, dt, psi)? {
            return Ok(());
        }
        if depth >= 20 {
            return Err(Error::ConvergenceFailure {
                rel_change: f64::NAN,
                tol: self.tol,
            });
        }
        self.step_split(coeffs, 0.5 * dt, psi, depth + 1)?;
        self.step_split(coeffs, 0.5 * dt, psi, depth + 1)
    }
}

impl StepKernel for KrylovKernel<'_> {
    fn step(&mut self, coeffs: &[f64], dt: f64, psi: &mut DVector<C64>) -> Result<()> {
        self.step_split(coeffs, dt, psi, 0)
    }
}
