use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `λ(t) = λ₀ + Δ·(t/t_f)²` with `t_f = 2|Δ|/v`.
///
/// The rate starts at zero and ends at `v·sign(Δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRamp {
    pub param_index: usize,
    pub lambda0: f64,
    pub delta: f64,
    pub v: f64,
}

impl QuadraticRamp {
    pub fn new(param_index: usize, lambda0: f64, delta: f64, v: f64) -> Result<Self> {
        if !lambda0.is_finite() || !delta.is_finite() || !v.is_finite() {
            return Err(Error::InvalidRamp("ramp values must be finite".into()));
        }
        if delta == 0.0 {
            return Err(Error::InvalidRamp(
                "zero excursion: the driven parameter never moves".into(),
            ));
        }
        if v <= 0.0 {
            return Err(Error::InvalidRamp(format!(
                "final rate must be positive, got {v}"
            )));
        }
        Ok(Self {
            param_index,
            lambda0,
            delta,
            v,
        })
    }

    /// Ramp that ends at `target` after moving by `delta`.
    pub fn ending_at(param_index: usize, target: f64, delta: f64, v: f64) -> Result<Self> {
        Self::new(param_index, target - delta, delta, v)
    }

    pub fn t_final(&self) -> f64 {
        2.0 * self.delta.abs() / self.v
    }

    pub fn final_value(&self) -> f64 {
        self.lambda0 + self.delta
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let t_final = self.t_final();
        if !(0.0..=t_final).contains(&t) {
            return Err(Error::TimeOutOfRange { t, t_final });
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.value_unchecked(t))
    }

    pub fn rate(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.rate_unchecked(t))
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        let s = t / self.t_final();
        self.lambda0 + self.delta * s * s
    }

    pub(crate) fn rate_unchecked(&self, t: f64) -> f64 {
        let tf = self.t_final();
        2.0 * self.delta * t / (tf * tf)
    }
}

/// Time-dependent parameter schedule driving an evolution.
///
/// Quadratic ramps are the protocol's schedule; [`Frozen`] holds the
/// parameters fixed, and other shapes can be plugged in through this trait.
pub trait Schedule: Send + Sync {
    fn t_final(&self) -> f64;

    /// Writes `λ(t)` into `params`, which arrives holding the base values.
    fn params_at(&self, t: f64, params: &mut [f64]);

    /// Writes `dλ/dt` into `rates`, which arrives zeroed.
    fn rates_at(&self, t: f64, rates: &mut [f64]);

    /// Parameter indices the schedule moves.
    fn driven(&self) -> Vec<usize>;
}

/// Several quadratic ramps sharing one final time.
#[derive(Clone, Debug)]
pub struct RampSet {
    ramps: Vec<QuadraticRamp>,
    t_final: f64,
}

impl RampSet {
    pub fn new(ramps: Vec<QuadraticRamp>) -> Result<Self> {
        let first = ramps
            .first()
            .ok_or_else(|| Error::InvalidRamp("no ramps given".into()))?;
        let t_final = first.t_final();
        for r in &ramps {
            if (r.t_final() - t_final).abs() > 1e-12 * t_final {
                return Err(Error::InvalidRamp(format!(
                    "ramps must share one final time, got {} and {}",
                    t_final,
                    r.t_final()
                )));
            }
        }
        for (i, r) in ramps.iter().enumerate() {
            if ramps[..i].iter().any(|q| q.param_index == r.param_index) {
                return Err(Error::InvalidRamp(format!(
                    "parameter {} is ramped twice",
                    r.param_index
                )));
            }
        }
        Ok(Self { ramps, t_final })
    }

    pub fn ramps(&self) -> &[QuadraticRamp] {
        &self.ramps
    }
}

impl Schedule for RampSet {
    fn t_final(&self) -> f64 {
        self.t_final
    }

    fn params_at(&self, t: f64, params: &mut [f64]) {
        for r in &self.ramps {
            params[r.param_index] = r.value_unchecked(t);
        }
    }

    fn rates_at(&self, t: f64, rates: &mut [f64]) {
        for r in &self.ramps {
            rates[r.param_index] = r.rate_unchecked(t);
        }
    }

    fn driven(&self) -> Vec<usize> {
        self.ramps.iter().map(|r| r.param_index).collect()
    }
}

/// Parameters held at their base values for `duration`.
#[derive(Clone, Copy, Debug)]
pub struct Frozen {
    pub duration: f64,
}

impl Schedule for Frozen {
    fn t_final(&self) -> f64 {
        self.duration
    }

    fn params_at(&self, _t: f64, _params: &mut [f64]) {}

    fn rates_at(&self, _t: f64, _rates: &mut [f64]) {}

    fn driven(&self) -> Vec<usize> {
        Vec::new()
    }
}
