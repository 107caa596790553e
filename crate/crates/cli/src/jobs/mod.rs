//! Job registry. Each subcommand is a [`Job`] trait object looked up by name.

mod extract;
mod heisenberg_scan;
mod nv_curve;
mod oracle;
mod qfim_sum;
mod sweep;
mod tfim_curve;

use std::collections::BTreeMap;
use std::sync::Arc;

use qfi_core::models::{build, Model};
use qfi_core::protocol::{relative_error, ExtractionSetup, QfiEstimate, SweepResult};
use rayon::prelude::*;

pub use extract::Extract;
pub use heisenberg_scan::HeisenbergScan;
pub use nv_curve::NvCurve;
pub use oracle::Oracle;
pub use qfim_sum::QfimSum;
pub use sweep::Sweep;
pub use tfim_curve::TfimCurve;

use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::JobOutput;

pub trait Job: Send + Sync {
    fn name(&self) -> &'static str;

    fn about(&self) -> &'static str;

    /// Base layer under the config file and overrides, as TOML.
    fn defaults(&self) -> &'static str;

    /// Job-specific checks beyond [`RunConfig::validate`].
    fn validate(&self, _config: &RunConfig) -> Result<(), RunError> {
        Ok(())
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError>;
}

#[derive(Clone, Default)]
pub struct JobRegistry {
    jobs: BTreeMap<&'static str, Arc<dyn Job>>,
}

impl JobRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The seven built-in jobs.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(Oracle));
        r.register(Arc::new(Extract));
        r.register(Arc::new(Sweep));
        r.register(Arc::new(QfimSum));
        r.register(Arc::new(TfimCurve));
        r.register(Arc::new(HeisenbergScan));
        r.register(Arc::new(NvCurve));
        r
    }

    pub fn register(&mut self, job: Arc<dyn Job>) -> Option<Arc<dyn Job>> {
        self.jobs.insert(job.name(), job)
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn Job>, RunError> {
        self.jobs
            .get(name)
            .ok_or_else(|| RunError::config(format!("unknown job `{name}`")))
    }

    pub fn jobs(&self) -> impl Iterator<Item = &Arc<dyn Job>> + '_ {
        self.jobs.values()
    }
}

/// Worker pool shared by a run.
pub struct Context {
    pool: rayon::ThreadPool,
}

impl Context {
    /// `threads = None` uses one worker per processor.
    pub fn new(threads: Option<usize>) -> Result<Self, RunError> {
        if threads == Some(0) {
            return Err(RunError::config("--jobs must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| RunError::config(format!("cannot start worker pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Maps `f` over `items` on the pool; results come back in input order.
    pub fn map<I, T, F>(&self, items: &[I], f: F) -> Result<Vec<T>, RunError>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> Result<T, RunError> + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }
}

pub(crate) fn model(config: &RunConfig) -> Result<Model, RunError> {
    Ok(build(&config.model.spec())?)
}

/// The grid's parameter index and values; a single point at `params` when no
/// grid is configured. `fallback` names the parameter in that case.
pub(crate) fn param_grid(
    config: &RunConfig,
    fallback: &str,
) -> Result<(String, usize, Vec<f64>), RunError> {
    match &config.grid {
        Some(g) => {
            let k = config.param_index(&g.param)?;
            Ok((g.param.clone(), k, g.points()?))
        }
        None => {
            let k = config.param_index(fallback)?;
            Ok((fallback.to_string(), k, vec![config.params[k]]))
        }
    }
}

pub(crate) fn with_value(params: &[f64], k: usize, x: f64) -> Vec<f64> {
    let mut p = params.to_vec();
    p[k] = x;
    p
}

/// One extracted value with the run it came from. For sweeps the value is
/// the extrapolation and the run details are those of the slowest ramp.
#[derive(Clone, Debug)]
pub(crate) struct Measured {
    pub estimate: f64,
    pub oracle: f64,
    pub v: f64,
    pub sah: f64,
    pub variance: f64,
    pub excited_population: f64,
}

impl Measured {
    pub const COLUMNS: [&'static str; 7] = [
        "v",
        "sah",
        "variance",
        "estimate",
        "oracle",
        "rel_error",
        "excited_population",
    ];

    fn from_estimate(e: &QfiEstimate, estimate: f64) -> Self {
        Self {
            estimate,
            oracle: e.oracle.unwrap_or(f64::NAN),
            v: e.v_used,
            sah: e.sah,
            variance: e.variance,
            excited_population: e.excited_population,
        }
    }

    fn from_sweep(s: &SweepResult) -> Self {
        let slowest = s.details.last().expect("sweeps have at least 3 runs");
        Self::from_estimate(slowest, s.extrapolated)
    }

    pub fn rel_error(&self) -> f64 {
        relative_error(self.estimate, self.oracle).unwrap_or(f64::NAN)
    }

    /// Values for [`Measured::COLUMNS`].
    pub fn row(&self) -> [f64; 7] {
        [
            self.v,
            self.sah,
            self.variance,
            self.estimate,
            self.oracle,
            self.rel_error(),
            self.excited_population,
        ]
    }
}

/// Runs `setup` at the configured `v`, or sweeps and extrapolates.
pub(crate) fn measure(setup: ExtractionSetup, config: &RunConfig) -> Result<Measured, RunError> {
    if let Some(v) = config.v {
        let e = setup.run(v, &config.evolution)?;
        return Ok(Measured::from_estimate(&e, e.value));
    }
    let velocities = match &config.velocities {
        Some(list) => list.clone(),
        None => setup.default_velocities()?,
    };
    Ok(Measured::from_sweep(
        &setup.sweep(&velocities, &config.evolution)?,
    ))
}

pub(crate) fn require_which(config: &RunConfig, n: usize) -> Result<(), RunError> {
    if config.which.len() != n {
        return Err(RunError::config(format!(
            "job `{}` needs {n} name(s) in `which`, got {}",
            config.job,
            config.which.len()
        )));
    }
    Ok(())
}

pub(crate) fn require_variant(config: &RunConfig, variant: &str) -> Result<(), RunError> {
    if config.model.variant != variant {
        return Err(RunError::config(format!(
            "job `{}` runs on model `{variant}`, not `{}`",
            config.job, config.model.variant
        )));
    }
    Ok(())
}

pub(crate) fn require_ramp(config: &RunConfig) -> Result<(), RunError> {
    if config.delta.is_none() && config.origin.is_none() {
        return Err(RunError::config(format!(
            "job `{}` needs `delta` or `origin`",
            config.job
        )));
    }
    Ok(())
}

pub(crate) fn parse_defaults(text: &str) -> toml::Table {
    toml::from_str(text).expect("built-in defaults are valid TOML")
}
