use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

use super::measure::{measure_sah, measure_variance};
use crate::error::{Error, Result};
use crate::linalg::{eigensystem, HermitianOperator, Spectrum, StateVector, DEFAULT_GAP_TOL};
use crate::models::Model;
use crate::oracle::{ground_derivative_components, transition_probs_from_spectrum};
use crate::propagator::{
    evolve_schedule, EvolutionConfig, EvolutionResult, QuadraticRamp, RampSet,
};

/// Final excited population above which an estimate is flagged as
/// non-adiabatic.
pub const NON_ADIABATIC_POPULATION: f64 = 0.05;

/// Target summed excited population for the default velocity grid.
pub const DEFAULT_GRID_POPULATION: f64 = 0.02;

/// Upper bound on `v / (|Δ|·ω)` for the default velocity grid, where `ω` is
/// the smallest gap to a level the drive couples to.
pub const DEFAULT_GRID_GAP_FRACTION: f64 = 0.02;

/// Upper bound on the relative interference in `sah` between the excitation
/// left by the ramp's initial acceleration and the final-rate signal, at the
/// largest velocity of the default grid.
pub const DEFAULT_GRID_SWITCH_ON: f64 = 0.004;

/// One protocol run: `value = 4·sah/v²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiEstimate {
    pub value: f64,
    pub v_used: f64,
    pub sah: f64,
    pub variance: f64,
    pub oracle: Option<f64>,
    pub rel_error: Option<f64>,
    /// `1 − |⟨φ₀|ψ(t_f)⟩|²` against the final ground state.
    pub excited_population: f64,
    pub non_adiabatic: bool,
    pub steps: usize,
    pub norm_drift: f64,
}

/// `|value − oracle| / |oracle|`, undefined when the oracle vanishes.
pub fn relative_error(value: f64, oracle: f64) -> Option<f64> {
    (oracle != 0.0).then(|| (value - oracle).abs() / oracle.abs())
}

/// Everything about a protocol instance that does not depend on `v`: the
/// initial ground state, the final spectrum and the oracle value.
///
/// All driven parameters move by the same `delta` along the same schedule, so
/// one driven parameter measures its QFI and two measure their QFIM block sum.
#[derive(Clone, Debug)]
pub struct ExtractionSetup {
    model: Model,
    start: Vec<f64>,
    target: Vec<f64>,
    driven: Vec<usize>,
    delta: f64,
    psi0: StateVector,
    final_h: HermitianOperator,
    final_spectrum: Spectrum,
    drive: HermitianOperator,
    oracle: f64,
    half_width: f64,
    coupled_gap: f64,
    switch_on_ratio: f64,
}

/// `Σ_μ ∂_μH` over the driven parameters.
fn drive_operator(model: &Model, params: &[f64], driven: &[usize]) -> Result<HermitianOperator> {
    let mut total = model.d_hamiltonian(params, driven[0])?;
    for &w in &driven[1..] {
        total = total.try_add(&model.d_hamiltonian(params, w)?)?;
    }
    Ok(total)
}

/// Smallest `E_k − E₀` among levels with a non-negligible `⟨φ_k|D|φ₀⟩`,
/// falling back to `E₁ − E₀` when `D` couples nothing.
fn coupled_gap(spectrum: &Spectrum, drive: &HermitianOperator) -> Result<f64> {
    let column = spectrum.ground_column(drive)?;
    let weights: Vec<f64> = column.iter().skip(1).map(|c| c.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let e0 = spectrum.ground_energy();
    let gap = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 1e-10 * total)
        .map(|(k, _)| spectrum.energy(k + 1) - e0)
        .fold(f64::INFINITY, f64::min);
    Ok(if gap.is_finite() {
        gap
    } else {
        spectrum.gap0()
    })
}

impl ExtractionSetup {
    /// Drives `driven` from `start` by `delta` each.
    pub fn new(model: Model, start: &[f64], driven: &[usize], delta: f64) -> Result<Self> {
        model.check_params(start)?;
        if driven.is_empty() || driven.len() > 2 {
            return Err(Error::InvalidInput(format!(
                "one or two driven parameters are supported, got {}",
                driven.len()
            )));
        }
        if driven.len() == 2 && driven[0] == driven[1] {
            return Err(Error::InvalidInput(
                "the two driven parameters must differ".into(),
            ));
        }
        // Validates delta and the indices before any eigensolve.
        for &w in driven {
            QuadraticRamp::new(w, start.get(w).copied().unwrap_or(0.0), delta, 1.0)?;
        }
        let mut target = start.to_vec();
        for &w in driven {
            target[w] = start[w] + delta;
        }

        let start_spectrum = eigensystem(&model.hamiltonian(start)?)?;
        start_spectrum.check_nondegenerate(DEFAULT_GAP_TOL)?;
        let start_drive = drive_operator(&model, start, driven)?;
        let start_gap = coupled_gap(&start_spectrum, &start_drive)?;
        let a_start = ground_derivative_components(&start_spectrum, &start_drive)?;
        let psi0 = start_spectrum.ground_state();

        let final_h = model.hamiltonian(&target)?;
        let final_spectrum = eigensystem(&final_h)?;
        final_spectrum.check_nondegenerate(DEFAULT_GAP_TOL)?;
        let drive = drive_operator(&model, &target, driven)?;
        let a = ground_derivative_components(&final_spectrum, &drive)?;
        let oracle = 4.0 * a.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let coupled_gap = start_gap.min(coupled_gap(&final_spectrum, &drive)?);

        // Levels are paired by index between the two ends of the ramp.
        let w0 = |k: usize| start_spectrum.energy(k) - start_spectrum.ground_energy();
        let wf = |k: usize| final_spectrum.energy(k) - final_spectrum.ground_energy();
        let leftover: f64 = (1..final_spectrum.dim())
            .map(|k| wf(k).powi(2) * a_start[k].norm_sqr() / w0(k).powi(4))
            .sum();
        let switch_on_ratio = (leftover / (oracle / 4.0)).sqrt();

        let half_width = start_spectrum.half_width().max(final_spectrum.half_width());

        Ok(Self {
            model,
            start: start.to_vec(),
            target,
            driven: driven.to_vec(),
            delta,
            psi0,
            final_h,
            final_spectrum,
            drive,
            oracle,
            half_width,
            coupled_gap,
            switch_on_ratio,
        })
    }

    /// Drives `driven` by `delta` so that they end at `target`.
    pub fn for_target(model: Model, target: &[f64], driven: &[usize], delta: f64) -> Result<Self> {
        model.check_params(target)?;
        let mut start = target.to_vec();
        for &w in driven {
            let x = start
                .get_mut(w)
                .ok_or_else(|| Error::InvalidParams(format!("parameter index {w} out of range")))?;
            *x -= delta;
        }
        Self::new(model, &start, driven, delta)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn driven(&self) -> &[usize] {
        &self.driven
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.psi0
    }

    pub fn final_hamiltonian(&self) -> &HermitianOperator {
        &self.final_h
    }

    pub fn final_spectrum(&self) -> &Spectrum {
        &self.final_spectrum
    }

    /// Spectral QFI (one driven parameter) or QFIM block sum (two) at the
    /// target.
    pub fn oracle(&self) -> f64 {
        self.oracle
    }

    /// Smallest gap to a drive-coupled level at either end of the ramp.
    pub fn coupled_gap(&self) -> f64 {
        self.coupled_gap
    }

    /// `R` such that the relative interference between the excitation left
    /// by the initial acceleration and the final-rate signal in `sah` is
    /// about `v·R/|Δ|`. Infinite when the oracle vanishes.
    pub fn switch_on_ratio(&self) -> f64 {
        self.switch_on_ratio
    }

    /// Leading-order final populations `p_1, p_2, …` for final rate `v`.
    pub fn predicted_populations(&self, v: f64) -> Result<Vec<f64>> {
        transition_probs_from_spectrum(&self.final_spectrum, &self.drive, v)
    }

    /// Populations of `psi` in the final eigenbasis, `p_0, p_1, …`.
    pub fn final_populations(&self, psi: &StateVector) -> Result<Vec<f64>> {
        self.final_spectrum.populations(psi)
    }

    /// Three velocities in ratio 2. The largest keeps the predicted excited
    /// population below 2%, `v ≤ 0.02·|Δ|·ω`, and the switch-on interference
    /// `v·R/|Δ|` below 0.4%; the last bound is dropped when the oracle is zero.
    pub fn default_velocities(&self) -> Result<Vec<f64>> {
        let per_v2: f64 = self.predicted_populations(1.0)?.iter().sum();
        let v_pop = if per_v2 > 0.0 {
            (DEFAULT_GRID_POPULATION / per_v2).sqrt()
        } else {
            f64::INFINITY
        };
        let v_gap = DEFAULT_GRID_GAP_FRACTION * self.delta.abs() * self.coupled_gap;
        let v_on = if self.switch_on_ratio.is_finite() && self.switch_on_ratio > 0.0 {
            DEFAULT_GRID_SWITCH_ON * self.delta.abs() / self.switch_on_ratio
        } else {
            f64::INFINITY
        };
        let v_max = v_pop.min(v_gap).min(v_on);
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cannot choose a velocity grid (v_max = {v_max})"
            )));
        }
        Ok(vec![v_max, v_max / 2.0, v_max / 4.0])
    }

    /// Runs the ramp at final rate `v` and returns the raw evolution.
    pub fn evolve(&self, v: f64, config: &EvolutionConfig) -> Result<EvolutionResult> {
        let ramps = self
            .driven
            .iter()
            .map(|&w| QuadraticRamp::new(w, self.start[w], self.delta, v))
            .collect::<Result<Vec<_>>>()?;
        let schedule = RampSet::new(ramps)?;
        evolve_schedule(
            &self.model,
            &self.start,
            &schedule,
            &self.psi0,
            config,
            Some(self.half_width),
        )
    }

    /// Turns a final state into an estimate.
    pub fn measure(&self, v: f64, result: &EvolutionResult) -> Result<QfiEstimate> {
        let psi = &result.final_state;
        let sah = measure_sah(&self.final_h, self.final_spectrum.ground_energy(), psi)?;
        let variance = measure_variance(&self.final_h, psi)?;
        let ground = self.final_spectrum.ground_state().overlap(psi)?;
        let excited_population = (1.0 - ground * ground).max(0.0);
        let non_adiabatic = excited_population > NON_ADIABATIC_POPULATION;
        if non_adiabatic {
            warn!(
                "final excited population {excited_population:.3} at v = {v} exceeds {NON_ADIABATIC_POPULATION}; \
                 the estimate is outside the slow-ramp regime"
            );
        }
        let value = 4.0 * sah / (v * v);
        Ok(QfiEstimate {
            value,
            v_used: v,
            sah,
            variance,
            oracle: Some(self.oracle),
            rel_error: relative_error(value, self.oracle),
            excited_population,
            non_adiabatic,
            steps: result.steps,
            norm_drift: result.norm_drift,
        })
    }

    pub fn run(&self, v: f64, config: &EvolutionConfig) -> Result<QfiEstimate> {
        let result = self.evolve(v, config)?;
        self.measure(v, &result)
    }

    /// Independent jobs, one per velocity.
    pub fn jobs(self: &Arc<Self>, velocities: &[f64]) -> Vec<ExtractionJob> {
        velocities
            .iter()
            .map(|&v| ExtractionJob {
                setup: Arc::clone(self),
                v,
            })
            .collect()
    }

    pub fn sweep(&self, velocities: &[f64], config: &EvolutionConfig) -> Result<SweepResult> {
        let estimates = velocities
            .iter()
            .map(|&v| self.run(v, config))
            .collect::<Result<Vec<_>>>()?;
        SweepResult::from_estimates(estimates)
    }
}

/// A single protocol run; jobs share their setup and can run in any order.
#[derive(Clone, Debug)]
pub struct ExtractionJob {
    pub setup: Arc<ExtractionSetup>,
    pub v: f64,
}

impl ExtractionJob {
    pub fn run(&self, config: &EvolutionConfig) -> Result<QfiEstimate> {
        self.setup.run(self.v, config)
    }
}

/// Least-squares line `y = a + b·x`, returned as `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(
            "a line needs at least two paired points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput(
            "log-log slope needs positive data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Ok(linear_fit(&lx, &ly)?.1)
}

/// Protocol estimates over several velocities, extrapolated to `v → 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Strictly decreasing.
    pub velocities: Vec<f64>,
    pub estimates: Vec<f64>,
    pub details: Vec<QfiEstimate>,
    /// Intercept of the fit `estimate = F + c·v`.
    pub extrapolated: f64,
    pub linear_coefficient: f64,
    /// `d ln(sah) / d ln(v)`; 2 in the slow-ramp regime.
    pub slope_loglog: f64,
    pub oracle: Option<f64>,
    pub rel_error: Option<f64>,
}

impl SweepResult {
    /// Aggregates estimates in any order; they are sorted by decreasing `v`.
    pub fn from_estimates(mut details: Vec<QfiEstimate>) -> Result<Self> {
        if details.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a sweep needs at least 3 velocities, got {}",
                details.len()
            )));
        }
        details.sort_by(|a, b| b.v_used.total_cmp(&a.v_used));
        if details.windows(2).any(|w| !(w[0].v_used > w[1].v_used)) {
            return Err(Error::InvalidInput(
                "sweep velocities must be distinct".into(),
            ));
        }
        let velocities: Vec<f64> = details.iter().map(|e| e.v_used).collect();
        let estimates: Vec<f64> = details.iter().map(|e| e.value).collect();
        let sah: Vec<f64> = details.iter().map(|e| e.sah).collect();
        let (extrapolated, linear_coefficient) = linear_fit(&velocities, &estimates)?;
        let slope_loglog = loglog_slope(&velocities, &sah).unwrap_or(f64::NAN);
        let oracle = details[0].oracle;
        Ok(Self {
            velocities,
            estimates,
            details,
            extrapolated,
            linear_coefficient,
            slope_loglog,
            oracle,
            rel_error: oracle.and_then(|o| relative_error(extrapolated, o)),
        })
    }
}

fn check_velocities(velocities: &[f64]) -> Result<()> {
    if velocities.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "a sweep needs at least 3 velocities, got {}",
            velocities.len()
        )));
    }
    if let Some(v) = velocities.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "velocities must be positive and finite, got {v}"
        )));
    }
    let increasing = velocities.windows(2).all(|w| w[0] < w[1]);
    let decreasing = velocities.windows(2).all(|w| w[0] > w[1]);
    if !increasing && !decreasing {
        return Err(Error::InvalidInput(
            "velocities must be strictly monotone".into(),
        ));
    }
    Ok(())
}

/// Ramps parameter `which` by `delta` into `target` at final rate `v`.
pub fn extract_qfi(
    model: &Model,
    target: &[f64],
    which: usize,
    delta: f64,
    v: f64,
    config: &EvolutionConfig,
) -> Result<QfiEstimate> {
    ExtractionSetup::for_target(model.clone(), target, &[which], delta)?.run(v, config)
}

/// [`extract_qfi`] at each velocity plus the `v → 0` extrapolation.
/// `None` selects [`ExtractionSetup::default_velocities`].
pub fn extract_qfi_sweep(
    model: &Model,
    target: &[f64],
    which: usize,
    delta: f64,
    velocities: Option<&[f64]>,
    config: &EvolutionConfig,
) -> Result<SweepResult> {
    let setup = ExtractionSetup::for_target(model.clone(), target, &[which], delta)?;
    let velocities = match velocities {
        Some(v) => v.to_vec(),
        None => setup.default_velocities()?,
    };
    check_velocities(&velocities)?;
    setup.sweep(&velocities, config)
}

/// Ramps both parameters of `pair` from `start` by the same `delta`; the
/// estimate approximates `F_xx + F_yy + 2F_xy` at `start + delta`.
pub fn extract_qfim_sum(
    model: &Model,
    start: &[f64],
    pair: [usize; 2],
    delta: f64,
    v: f64,
    config: &EvolutionConfig,
) -> Result<QfiEstimate> {
    ExtractionSetup::new(model.clone(), start, &pair, delta)?.run(v, config)
}

/// `F_xy = (sum − F_xx − F_yy) / 2`.
pub fn qfim_offdiagonal(sum: f64, f_xx: f64, f_yy: f64) -> f64 {
    0.5 * (sum - f_xx - f_yy)
}
