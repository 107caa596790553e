use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::operator::{hermiticity_deviation, HERMITICITY_TOL};
use super::{HermitianOperator, StateVector};
use crate::error::{Error, Result};

/// Relative gap below which a ground state is treated as degenerate.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Full ascending spectrum of a Hermitian operator.
///
/// Eigenvectors are stored as the columns of a unitary matrix with the phase
/// of each fixed so that its largest-magnitude component is real and positive.
#[derive(Clone, Debug)]
pub struct Spectrum {
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// `E_1 - E_0`, infinite for a one-dimensional space.
    pub fn gap0(&self) -> f64 {
        if self.dim() < 2 {
            f64::INFINITY
        } else {
            self.energies[1] - self.energies[0]
        }
    }

    /// `max |E_n|`, the spectral norm of the operator.
    pub fn spectral_radius(&self) -> f64 {
        self.energies[0]
            .abs()
            .max(self.energies[self.dim() - 1].abs())
    }

    /// Half of `E_max - E_min`; unchanged by `H → H + c·I`.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.energies[self.dim() - 1] - self.energies[0])
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn eigenstate(&self, n: usize) -> StateVector {
        StateVector::from_raw(self.vectors.column(n).into_owned())
    }

    pub fn ground_state(&self) -> StateVector {
        self.eigenstate(0)
    }

    /// Components `⟨φ_n|ψ⟩` of a state in the eigenbasis.
    pub fn coefficients(&self, psi: &StateVector) -> Result<DVector<C64>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        Ok(self.vectors.ad_mul(psi.amplitudes()))
    }

    /// `|⟨φ_n|ψ⟩|²` for every level.
    pub fn populations(&self, psi: &StateVector) -> Result<Vec<f64>> {
        Ok(self
            .coefficients(psi)?
            .iter()
            .map(|c| c.norm_sqr())
            .collect())
    }

    /// Matrix elements `⟨φ_n|A|φ_0⟩` for all `n`.
    pub fn ground_column(&self, op: &HermitianOperator) -> Result<DVector<C64>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        let a_phi0 = op.matrix() * self.vectors.column(0);
        Ok(self.vectors.ad_mul(&a_phi0))
    }

    /// Errors when `E_1 - E_0 < gap_tol · max(1, ‖H‖)`.
    pub fn check_nondegenerate(&self, gap_tol: f64) -> Result<()> {
        let gap = self.gap0();
        let threshold = gap_tol * self.spectral_radius().max(1.0);
        if gap < threshold {
            return Err(Error::DegenerateGroundState { gap, threshold });
        }
        Ok(())
    }
}

fn ensure_hermitian(op: &HermitianOperator) -> Result<()> {
    let deviation = hermiticity_deviation(op.matrix());
    if !(deviation <= HERMITICITY_TOL) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Full eigendecomposition, ascending.
///
/// Real symmetric input takes the real solver, which is several times faster
/// than the complex one at spin-chain sizes.
pub fn eigensystem(op: &HermitianOperator) -> Result<Spectrum> {
    ensure_hermitian(op)?;
    let (values, vectors) = if op.is_real() {
        let real = op.matrix().map(|c| c.re);
        let eig = SymmetricEigen::try_new(real, f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("real symmetric solver did not converge".into()))?;
        (eig.eigenvalues, eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let eig = SymmetricEigen::try_new(op.matrix().clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("Hermitian solver did not converge".into()))?;
        (eig.eigenvalues, eig.eigenvectors)
    };
    if values.iter().any(|e| !e.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }

    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let energies = order.iter().map(|&i| values[i]).collect();
    let mut sorted = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src).into_owned();
        fix_phase(&mut col);
        sorted.set_column(dst, &col);
    }
    Ok(Spectrum {
        energies,
        vectors: sorted,
    })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(op: &HermitianOperator) -> Result<Vec<f64>> {
    ensure_hermitian(op)?;
    let mut values: Vec<f64> = if op.is_real() {
        op.matrix()
            .map(|c| c.re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        op.matrix()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Lowest eigenpair, failing when the ground state is degenerate within
/// `gap_tol` relative to `max(1, ‖H‖)`.
pub fn ground_state(op: &HermitianOperator, gap_tol: f64) -> Result<(f64, StateVector)> {
    let spectrum = eigensystem(op)?;
    spectrum.check_nondegenerate(gap_tol)?;
    Ok((spectrum.ground_energy(), spectrum.ground_state()))
}

/// Index of the largest-magnitude component; near-ties (within `1e-12`
/// relative) go to the lowest index so the convention is stable under
/// roundoff.
pub(crate) fn phase_anchor(col: &DVector<C64>) -> usize {
    let max = col.iter().map(|c| c.norm()).fold(0.0, f64::max);
    col.iter()
        .position(|c| c.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0)
}

fn fix_phase(col: &mut DVector<C64>) {
    let best = phase_anchor(col);
    let best_mag = col[best].norm();
    if best_mag > 0.0 {
        let phase = col[best].conj() / best_mag;
        col.apply(|c| *c *= phase);
    }
}
