use std::sync::Arc;

use qfi_core::protocol::{relative_error, ExtractionSetup, SweepResult};
use serde_json::json;

use super::{model, require_ramp, require_which, Context, Job};
use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::{JobOutput, Table};

/// One target, several final rates, and the `v → 0` extrapolation.
pub struct Sweep;

impl Job for Sweep {
    fn name(&self) -> &'static str {
        "sweep"
    }

    fn about(&self) -> &'static str {
        "Extraction at several velocities with linear extrapolation to v = 0"
    }

    fn defaults(&self) -> &'static str {
        r#"
params = [1.5707963267948966, 0.0]
which = ["theta"]
origin = 0.0

[model]
variant = "two-level"
"#
    }

    fn validate(&self, config: &RunConfig) -> Result<(), RunError> {
        require_which(config, 1)?;
        require_ramp(config)?;
        if config.v.is_some() {
            return Err(RunError::config("job `sweep` takes `velocities`, not `v`"));
        }
        if config.grid.is_some() {
            return Err(RunError::config(
                "job `sweep` runs at a single target; drop `grid`",
            ));
        }
        Ok(())
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError> {
        let m = model(config)?;
        let w = config.param_index(&config.which[0])?;
        let delta = config.delta_for(config.params[w])?;
        let setup = Arc::new(ExtractionSetup::for_target(m, &config.params, &[w], delta)?);
        let velocities = match &config.velocities {
            Some(list) => list.clone(),
            None => setup.default_velocities()?,
        };
        let jobs = setup.jobs(&velocities);
        let estimates = ctx.map(&jobs, |job| Ok(job.run(&config.evolution)?))?;
        let sweep = SweepResult::from_estimates(estimates)?;

        let mut table = Table::new([
            "v",
            "sah",
            "variance",
            "estimate",
            "oracle",
            "rel_error",
            "excited_population",
            "extrapolated",
            "slope_loglog",
        ]);
        for e in &sweep.details {
            let oracle = e.oracle.unwrap_or(f64::NAN);
            table.push(vec![
                e.v_used,
                e.sah,
                e.variance,
                e.value,
                oracle,
                relative_error(e.value, oracle).unwrap_or(f64::NAN),
                e.excited_population,
                sweep.extrapolated,
                sweep.slope_loglog,
            ]);
        }
        let summary = [
            ("extrapolated", json!(sweep.extrapolated)),
            ("linear_coefficient", json!(sweep.linear_coefficient)),
            ("slope_loglog", json!(finite(sweep.slope_loglog))),
            ("oracle", json!(sweep.oracle)),
            ("rel_error", json!(sweep.rel_error)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Ok(JobOutput { table, summary })
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
