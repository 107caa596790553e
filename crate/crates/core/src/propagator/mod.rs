//! Time-dependent Schrödinger evolution under ramped parameters.
//!
//! Each step applies `exp(−i·H(t + dt/2)·dt)`, the midpoint (second-order
//! Magnus) propagator. The state is never renormalized, so the reported norm
//! drift is an honest check on the steppers.

mod krylov;
mod ramp;
mod stepper;

use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use krylov::KrylovStepper;
pub use ramp::{Frozen, QuadraticRamp, RampSet, Schedule};
pub use stepper::{EigenStepper, StepKernel, Stepper, StepperRegistry, AUTO_DENSE_MAX_DIM};

use crate::error::{Error, Result};
use crate::format::sci12;
use crate::linalg::{eigensystem, eigenvalues, StateVector};
use crate::models::{Model, ParametricHamiltonian};

/// Fewest steps any evolution may take.
pub const MIN_STEPS: usize = 100;

/// How many midpoint steps to take.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `max(100, ceil(t_f · w / phase))`, with `w` the larger spectral
    /// half-width `(E_max − E_min)/2` of the two endpoint Hamiltonians.
    Spectral {
        phase_per_step: f64,
    },
    Fixed(usize),
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule::Spectral {
            phase_per_step: 0.02,
        }
    }
}

impl StepRule {
    pub fn resolve(&self, t_final: f64, half_width: f64) -> Result<usize> {
        match *self {
            StepRule::Fixed(n) if n < MIN_STEPS => Err(Error::InvalidConfig(format!(
                "at least {MIN_STEPS} steps are required, got {n}"
            ))),
            StepRule::Fixed(n) => Ok(n),
            StepRule::Spectral { phase_per_step } if !(phase_per_step > 0.0) => {
                Err(Error::InvalidConfig(format!(
                    "phase per step must be positive, got {phase_per_step}"
                )))
            }
            StepRule::Spectral { phase_per_step } => {
                // Shaved so that roundoff in the half-width (e.g. of `H + cI`)
                // cannot add a step when the ratio is an exact integer.
                let n = (t_final * half_width / phase_per_step * (1.0 - 1e-12)).ceil();
                if !n.is_finite() || n > 1e9 {
                    return Err(Error::InvalidConfig(format!(
                        "step rule asks for {n} steps"
                    )));
                }
                Ok((n as usize).max(MIN_STEPS))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub steps: StepRule,
    /// `auto`, `eigen` or `krylov`.
    pub stepper: String,
    pub record_trajectory: bool,
    /// Approximate number of trajectory samples between `0` and `t_f`.
    pub trajectory_samples: usize,
    /// Highest excited level whose population is recorded.
    pub population_cap: usize,
    pub norm_tol: f64,
    /// Re-run at twice the steps and compare the final energy variance.
    pub check_convergence: bool,
    pub convergence_tol: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            steps: StepRule::default(),
            stepper: "auto".into(),
            record_trajectory: false,
            trajectory_samples: 100,
            population_cap: 8,
            norm_tol: 1e-9,
            check_convergence: false,
            convergence_tol: 1e-3,
        }
    }
}

/// Instantaneous-eigenbasis populations at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub params: Vec<f64>,
    /// `p_0 … p_cap`.
    pub populations: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub param_names: Vec<String>,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// Header `t,<params>,p0,…` then one row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n_pop = self
            .points
            .iter()
            .map(|p| p.populations.len())
            .max()
            .unwrap_or(0);
        let mut header = vec!["t".to_string()];
        header.extend(self.param_names.iter().cloned());
        header.extend((0..n_pop).map(|k| format!("p{k}")));
        writeln!(out, "{}", header.join(","))?;
        for p in &self.points {
            let mut row = vec![sci12(p.t)];
            row.extend(p.params.iter().map(|&x| sci12(x)));
            row.extend(
                (0..n_pop).map(|k| p.populations.get(k).map_or_else(String::new, |&x| sci12(x))),
            );
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Outcome of the step-doubling re-run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCheck {
    pub coarse_steps: usize,
    pub rel_change: f64,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_state: StateVector,
    pub final_params: Vec<f64>,
    pub final_rates: Vec<f64>,
    pub t_final: f64,
    pub steps: usize,
    pub stepper: &'static str,
    pub norm_drift: f64,
    pub step_check: Option<StepCheck>,
    pub trajectory: Option<Trajectory>,
}

/// Evolves `psi0` under `H(λ(t))`, where the ramped parameters follow
/// `ramps` and all others stay at `base_params`.
pub fn evolve(
    model: &Model,
    base_params: &[f64],
    ramps: &[QuadraticRamp],
    psi0: &StateVector,
    config: &EvolutionConfig,
) -> Result<EvolutionResult> {
    let schedule = RampSet::new(ramps.to_vec())?;
    evolve_schedule(model, base_params, &schedule, psi0, config, None)
}

/// Larger spectral half-width of the Hamiltonians at `t = 0` and `t = t_f`.
pub fn endpoint_half_width(
    model: &Model,
    base_params: &[f64],
    schedule: &dyn Schedule,
) -> Result<f64> {
    let mut width = 0.0_f64;
    for t in [0.0, schedule.t_final()] {
        let mut p = base_params.to_vec();
        schedule.params_at(t, &mut p);
        let e = eigenvalues(&model.hamiltonian(&p)?)?;
        width = width.max(0.5 * (e[e.len() - 1] - e[0]));
    }
    Ok(width)
}

/// [`evolve`] for an arbitrary schedule. `half_width` skips the endpoint
/// eigenvalue solves when the caller already knows the spectra.
pub fn evolve_schedule(
    model: &Model,
    base_params: &[f64],
    schedule: &dyn Schedule,
    psi0: &StateVector,
    config: &EvolutionConfig,
    half_width: Option<f64>,
) -> Result<EvolutionResult> {
    model.check_params(base_params)?;
    if psi0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: psi0.dim(),
        });
    }
    if let Some(&i) = schedule.driven().iter().find(|&&i| i >= model.n_params()) {
        return Err(Error::InvalidParams(format!(
            "ramped parameter index {i} out of range"
        )));
    }
    let t_final = schedule.t_final();
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidRamp(format!(
            "final time must be positive and finite, got {t_final}"
        )));
    }
    let half_width = match half_width {
        Some(w) => w,
        None => endpoint_half_width(model, base_params, schedule)?,
    };
    let steps = config.steps.resolve(t_final, half_width)?;
    let stepper = StepperRegistry::builtin().resolve(&config.stepper, model.dim())?;

    let run = Run {
        model,
        base_params,
        schedule,
        stepper: stepper.as_ref(),
        config,
    };
    if !config.check_convergence {
        return run.integrate(psi0, steps, config.record_trajectory);
    }
    let coarse = run.integrate(psi0, steps, false)?;
    let mut fine = run.integrate(psi0, 2 * steps, config.record_trajectory)?;
    let h = model.parametric();
    let coeffs = h.coefficients(&fine.final_params);
    let a = energy_variance(h, &coeffs, coarse.final_state.amplitudes());
    let b = energy_variance(h, &coeffs, fine.final_state.amplitudes());
    let floor = 1e-12 * half_width * half_width;
    let rel_change = (a - b).abs() / a.abs().max(b.abs()).max(floor);
    if rel_change > config.convergence_tol {
        return Err(Error::ConvergenceFailure {
            rel_change,
            tol: config.convergence_tol,
        });
    }
    fine.step_check = Some(StepCheck {
        coarse_steps: steps,
        rel_change,
    });
    Ok(fine)
}

/// `‖(H − ⟨H⟩)ψ‖²` using the sparse terms.
fn energy_variance(h: &ParametricHamiltonian, coeffs: &[f64], psi: &DVector<C64>) -> f64 {
    let mut hpsi = DVector::zeros(psi.len());
    h.apply(coeffs, psi.as_slice(), hpsi.as_mut_slice());
    let mean = psi.dotc(&hpsi).re;
    hpsi.axpy(C64::new(-mean, 0.0), psi, C64::new(1.0, 0.0));
    hpsi.norm_squared()
}

struct Run<'a> {
    model: &'a Model,
    base_params: &'a [f64],
    schedule: &'a dyn Schedule,
    stepper: &'a dyn Stepper,
    config: &'a EvolutionConfig,
}

impl Run<'_> {
    fn params_at(&self, t: f64) -> Vec<f64> {
        let mut p = self.base_params.to_vec();
        self.schedule.params_at(t, &mut p);
        p
    }

    fn sample(&self, t: f64, psi: &DVector<C64>) -> Result<TrajectoryPoint> {
        let params = self.params_at(t);
        let spectrum = eigensystem(&self.model.hamiltonian(&params)?)?;
        let cap = self.config.population_cap.min(spectrum.dim() - 1);
        let coeffs = spectrum.coefficients(&StateVector::from_raw(psi.clone()))?;
        let populations = coeffs.iter().take(cap + 1).map(|c| c.norm_sqr()).collect();
        Ok(TrajectoryPoint {
            t,
            params,
            populations,
        })
    }

    fn integrate(&self, psi0: &StateVector, steps: usize, record: bool) -> Result<EvolutionResult> {
        let h = self.model.parametric();
        let t_final = self.schedule.t_final();
        let dt = t_final / steps as f64;
        let every = (steps / self.config.trajectory_samples.max(1)).max(1);

        let mut kernel = self.stepper.kernel(h);
        let mut psi = psi0.amplitudes().clone();
        let mut points = Vec::new();
        if record {
            points.push(self.sample(0.0, &psi)?);
        }
        for k in 0..steps {
            let t_mid = (k as f64 + 0.5) * dt;
            let coeffs = h.coefficients(&self.params_at(t_mid));
            kernel.step(&coeffs, dt, &mut psi)?;
            if record && ((k + 1) % every == 0 || k + 1 == steps) {
                points.push(self.sample((k + 1) as f64 * dt, &psi)?);
            }
        }

        let norm_drift = (psi.norm() - 1.0).abs();
        if !(norm_drift <= self.config.norm_tol) {
            return Err(Error::NormDrift {
                drift: norm_drift,
                tol: self.config.norm_tol,
            });
        }
        let final_params = self.params_at(t_final);
        let mut final_rates = vec![0.0; final_params.len()];
        self.schedule.rates_at(t_final, &mut final_rates);
        let trajectory = record.then(|| Trajectory {
            param_names: self
                .model
                .param_names()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            points,
        });
        Ok(EvolutionResult {
            final_state: StateVector::from_raw(psi),
            final_params,
            final_rates,
            t_final,
            steps,
            stepper: self.stepper.name(),
            norm_drift,
            step_check: None,
            trajectory,
        })
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::linalg::ground_state;
    use crate::models::{build, ModelSpec};

    #[test]
    fn step_rule_resolution() {
        assert_eq!(StepRule::Fixed(100).resolve(1.0, 1.0).unwrap(), 100);
        assert!(StepRule::Fixed(99).resolve(1.0, 1.0).is_err());
        assert_eq!(StepRule::default().resolve(1.0, 1.0).unwrap(), 100);
        assert_eq!(StepRule::default().resolve(10.0, 3.0).unwrap(), 1500);
        assert!(StepRule::Spectral {
            phase_per_step: 0.0
        }
        .resolve(1.0, 1.0)
        .is_err());
    }

    #[test]
    fn frozen_ground_state_is_stationary() {
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let params = [0.8, 0.3];
        let (_, phi0) = ground_state(&m.hamiltonian(&params).unwrap(), 1e-8).unwrap();
        let r = evolve_schedule(
            &m,
            &params,
            &Frozen { duration: 37.0 },
            &phi0,
            &EvolutionConfig::default(),
            None,
        )
        .unwrap();
        assert!((r.final_state.overlap(&phi0).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(r.final_rates, vec![0.0, 0.0]);
    }

    #[test]
    fn parameter_that_does_not_enter_leaves_state_alone() {
        // At θ = 0 the two-level Hamiltonian ignores φ.
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let (_, phi0) = ground_state(&m.hamiltonian(&[0.0, 0.0]).unwrap(), 1e-8).unwrap();
        let ramp = QuadraticRamp::new(1, 0.0, 2.0, 0.1).unwrap();
        let r = evolve(&m, &[0.0, 0.0], &[ramp], &phi0, &EvolutionConfig::default()).unwrap();
        assert!((r.final_state.overlap(&phi0).unwrap() - 1.0).abs() < 1e-9);
        assert!((r.final_params[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trajectory_is_recorded_and_exported() {
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let psi0 = StateVector::basis(2, 1).unwrap();
        let ramp = QuadraticRamp::new(0, 0.0, FRAC_PI_2, 0.5).unwrap();
        let config = EvolutionConfig {
            record_trajectory: true,
            trajectory_samples: 10,
            ..Default::default()
        };
        let r = evolve(&m, &[0.0, 0.0], &[ramp], &psi0, &config).unwrap();
        let traj = r.trajectory.unwrap();
        assert_eq!(traj.points.first().unwrap().t, 0.0);
        assert!((traj.points.last().unwrap().t - r.t_final).abs() < 1e-12);
        for p in &traj.points {
            assert_eq!(p.populations.len(), 2);
            assert!((p.populations.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,theta,phi,p0,p1\n"));
        assert_eq!(text.lines().count(), traj.points.len() + 1);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let psi = StateVector::basis(4, 0).unwrap();
        let ramp = QuadraticRamp::new(0, 0.0, 1.0, 0.5).unwrap();
        assert!(matches!(
            evolve(&m, &[0.0, 0.0], &[ramp], &psi, &EvolutionConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let psi = StateVector::basis(2, 0).unwrap();
        let bad = QuadraticRamp::new(5, 0.0, 1.0, 0.5).unwrap();
        assert!(evolve(&m, &[0.0, 0.0], &[bad], &psi, &EvolutionConfig::default()).is_err());
        let unknown = EvolutionConfig {
            stepper: "rk4".into(),
            ..Default::default()
        };
        assert!(matches!(
            evolve(&m, &[0.0, 0.0], &[ramp], &psi, &unknown),
            Err(Error::Unknown {
                kind: "stepper",
                ..
            })
        ));
    }

    #[test]
    fn doubling_check_reports_change() {
        let m = build(&ModelSpec::new("two-level")).unwrap();
        let psi0 = StateVector::basis(2, 1).unwrap();
        let ramp = QuadraticRamp::new(0, 0.0, FRAC_PI_2, 0.1).unwrap();
        let config = EvolutionConfig {
            check_convergence: true,
            ..Default::default()
        };
        let r = evolve(&m, &[0.0, 0.0], &[ramp], &psi0, &config).unwrap();
        let check = r.step_check.unwrap();
        assert_eq!(r.steps, 2 * check.coarse_steps);
        assert!(check.rel_change < 1e-3);
    }
}
