//! Reference values: ground-state QFI/QFIM from the full spectrum, the
//! closed-form transverse-field Ising result, and the leading-order
//! transition probabilities of a slow ramp.
//!
//! Eigenstate derivatives are never taken by differentiating eigenvectors.
//! Every `⟨φ_n|∂φ₀⟩` comes from `⟨φ_n|∂H|φ₀⟩ / (E₀ − E_n)`, which is
//! independent of the eigenvector phase convention.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigensystem, HermitianOperator, Spectrum, DEFAULT_GAP_TOL};
use crate::models::Model;

/// Symmetric positive-semidefinite QFI matrix over a subset of parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfimMatrix {
    pub param_indices: Vec<usize>,
    pub values: DMatrix<f64>,
}

impl QfimMatrix {
    pub fn len(&self) -> usize {
        self.param_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.param_indices.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[(a, b)]
    }

    /// `Σ_{μν} F_{μν}` over all entries.
    pub fn block_sum(&self) -> f64 {
        self.values.sum()
    }

    pub fn trace(&self) -> f64 {
        self.values.trace()
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.values - self.values.transpose()).abs().max()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values.clone().symmetric_eigenvalues().min()
    }
}

/// `⟨φ_n|∂φ₀⟩ = ⟨φ_n|∂H|φ₀⟩ / (E₀ − E_n)` for `n ≥ 1`; the `n = 0` entry is 0.
pub fn ground_derivative_components(
    spectrum: &Spectrum,
    d_h: &HermitianOperator,
) -> Result<DVector<C64>> {
    let column = spectrum.ground_column(d_h)?;
    let e0 = spectrum.ground_energy();
    let mut out = DVector::zeros(spectrum.dim());
    for n in 1..spectrum.dim() {
        out[n] = column[n] / (e0 - spectrum.energy(n));
    }
    Ok(out)
}

/// `F = 4 Σ_{n≠0} |⟨φ_n|∂H|φ₀⟩|² / (E_n − E₀)²` for a precomputed spectrum.
pub fn qfi_from_spectrum(spectrum: &Spectrum, d_h: &HermitianOperator) -> Result<f64> {
    let a = ground_derivative_components(spectrum, d_h)?;
    Ok(4.0 * a.iter().map(|c| c.norm_sqr()).sum::<f64>())
}

/// `F_{μν} = 4 Re Σ_{n≠0} ⟨∂_μφ₀|φ_n⟩⟨φ_n|∂_νφ₀⟩` for a precomputed spectrum.
pub fn qfim_from_spectrum(
    spectrum: &Spectrum,
    param_indices: &[usize],
    derivatives: &[HermitianOperator],
) -> Result<QfimMatrix> {
    if param_indices.len() != derivatives.len() {
        return Err(Error::InvalidInput(
            "one derivative operator is needed per parameter".into(),
        ));
    }
    let comps = derivatives
        .iter()
        .map(|d| ground_derivative_components(spectrum, d))
        .collect::<Result<Vec<_>>>()?;
    let k = comps.len();
    let mut values = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let s: C64 = comps[a]
                .iter()
                .zip(comps[b].iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            let f = 4.0 * s.re;
            values[(a, b)] = f;
            values[(b, a)] = f;
        }
    }
    Ok(QfimMatrix {
        param_indices: param_indices.to_vec(),
        values,
    })
}

fn gapped_spectrum(model: &Model, params: &[f64]) -> Result<Spectrum> {
    let spectrum = eigensystem(&model.hamiltonian(params)?)?;
    spectrum.check_nondegenerate(DEFAULT_GAP_TOL)?;
    Ok(spectrum)
}

/// Ground-state QFI with respect to parameter `which`.
pub fn qfi_ground(model: &Model, params: &[f64], which: usize) -> Result<f64> {
    let spectrum = gapped_spectrum(model, params)?;
    qfi_from_spectrum(&spectrum, &model.d_hamiltonian(params, which)?)
}

/// Ground-state QFI matrix over `which_list`.
pub fn qfim_ground(model: &Model, params: &[f64], which_list: &[usize]) -> Result<QfimMatrix> {
    if which_list.is_empty() {
        return Err(Error::InvalidInput("empty parameter list".into()));
    }
    let spectrum = gapped_spectrum(model, params)?;
    let derivs = which_list
        .iter()
        .map(|&w| model.d_hamiltonian(params, w))
        .collect::<Result<Vec<_>>>()?;
    qfim_from_spectrum(&spectrum, which_list, &derivs)
}

/// Closed-form field QFI of the periodic transverse-field Ising chain,
/// `Σ_k J² sin²k / (J² + B² − 2JB cos k)²` over `k = (2m−1)π/N`,
/// `m = 1…N/2` (the even-parity sector holding the ground state).
pub fn tfim_qfi_analytic(j: f64, b: f64, n: usize) -> Result<f64> {
    if !(2..=12).contains(&n) || n % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "the closed form needs an even chain of 2..=12 sites, got {n}"
        )));
    }
    let mut total = 0.0;
    for m in 1..=n / 2 {
        let k = (2 * m - 1) as f64 * PI / n as f64;
        let denom = j * j + b * b - 2.0 * j * b * k.cos();
        if denom == 0.0 {
            return Err(Error::InvalidInput(format!(
                "pole of the closed form at J = {j}, B = {b}"
            )));
        }
        total += j * j * k.sin().powi(2) / (denom * denom);
    }
    Ok(total)
}

/// Leading-order final populations `p_k = v² |⟨φ_k|∂H|φ₀⟩|² / (E_k − E₀)⁴`
/// for `k = 1, 2, …` after a ramp of `which` that ends at `params` with rate
/// `rate`.
pub fn perturbative_transition_probs(
    model: &Model,
    params: &[f64],
    which: usize,
    rate: f64,
) -> Result<Vec<f64>> {
    let spectrum = gapped_spectrum(model, params)?;
    transition_probs_from_spectrum(&spectrum, &model.d_hamiltonian(params, which)?, rate)
}

pub fn transition_probs_from_spectrum(
    spectrum: &Spectrum,
    d_h: &HermitianOperator,
    rate: f64,
) -> Result<Vec<f64>> {
    let column = spectrum.ground_column(d_h)?;
    let e0 = spectrum.ground_energy();
    Ok((1..spectrum.dim())
        .map(|k| rate * rate * column[k].norm_sqr() / (spectrum.energy(k) - e0).powi(4))
        .collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    use super::*;
    use crate::models::{build, ModelSpec};

    #[test]
    fn two_level_equator_has_unit_qfi() {
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let f = qfi_ground(&m, &[FRAC_PI_2, 0.0], 0).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_without_effect_has_zero_qfi() {
        // At θ = 0 the Hamiltonian does not depend on φ.
        let m = build(&ModelSpec::new("two-level")).unwrap();
        assert_eq!(qfi_ground(&m, &[0.0, 0.4], 1).unwrap(), 0.0);
    }

    #[test]
    fn theta_phi_off_diagonal_vanishes() {
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let q = qfim_ground(&m, &[FRAC_PI_3, 0.0], &[0, 1]).unwrap();
        assert!(q.get(0, 1).abs() < 1e-12);
        assert!((q.get(0, 0) - 1.0).abs() < 1e-12);
        assert!((q.get(1, 1) - FRAC_PI_3.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn single_entry_qfim_equals_qfi() {
        let m = build(&ModelSpec::new("two-param")).unwrap();
        let p = [0.9, 0.3];
        let q = qfim_ground(&m, &p, &[1]).unwrap();
        assert_eq!(q.get(0, 0), qfi_ground(&m, &p, 1).unwrap());
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(tfim_qfi_analytic(0.0, 3.0, 8).unwrap(), 0.0);
        assert!(tfim_qfi_analytic(10.0, 1e4, 8).unwrap() < 1e-12);
        assert!(tfim_qfi_analytic(10.0, 10.0, 7).is_err());
        assert!(tfim_qfi_analytic(10.0, 10.0, 14).is_err());
        assert!(tfim_qfi_analytic(0.0, 0.0, 4).is_err());
    }

    #[test]
    fn two_level_transition_probability() {
        // |⟨φ₁|∂_θφ₀⟩| = 1/2, gap 2: p₁ = v²·(1/4)/4 at any θ.
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let p = perturbative_transition_probs(&m, &[1.0, 0.0], 0, 0.1).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] - 6.25e-4).abs() < 1e-15);
        let zero = perturbative_transition_probs(&m, &[1.0, 0.0], 0, 0.0).unwrap();
        assert_eq!(zero, vec![0.0]);
    }

    #[test]
    fn degenerate_point_is_reported() {
        let m = build(&ModelSpec::new("heisenberg").with("j", -0.25)).unwrap();
        assert!(matches!(
            qfi_ground(&m, &[FRAC_PI_2], 0),
            Err(Error::DegenerateGroundState { .. })
        ));
    }
}
