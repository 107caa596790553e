use qfi_core::protocol::ExtractionSetup;

use super::{measure, model, param_grid, require_ramp, with_value, Context, Job, Measured};
use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::{JobOutput, Table};

/// Per-parameter QFI curves of the NV two-qubit model along a grid, each
/// parameter ramped on its own into the grid point.
pub struct NvCurve;

impl Job for NvCurve {
    fn name(&self) -> &'static str {
        "nv-curve"
    }

    fn about(&self) -> &'static str {
        "NV two-qubit F_theta and F_phi along a theta grid, extracted and spectral"
    }

    fn defaults(&self) -> &'static str {
        r#"
params = [0.0, 0.0]
which = ["theta", "phi"]
delta = 1.5707963267948966
grid = { param = "theta", start = 0.0, stop = 3.141592653589793, step = 0.39269908169872414 }

[model]
variant = "nv"
"#
    }

    fn validate(&self, config: &RunConfig) -> Result<(), RunError> {
        if config.which.is_empty() {
            return Err(RunError::config(
                "job `nv-curve` needs at least one name in `which`",
            ));
        }
        require_ramp(config)
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError> {
        let m = model(config)?;
        let (grid_name, k, points) = param_grid(config, &config.which[0])?;
        let which: Vec<usize> = config
            .which
            .iter()
            .map(|w| config.param_index(w))
            .collect::<Result<_, _>>()?;
        // Flattened so the pool balances across both parameters.
        let runs: Vec<(f64, usize)> = points
            .iter()
            .flat_map(|&x| which.iter().map(move |&w| (x, w)))
            .collect();
        let results = ctx.map(&runs, |&(x, w)| -> Result<Measured, RunError> {
            let target = with_value(&config.params, k, x);
            let delta = config.delta_for(target[w])?;
            measure(
                ExtractionSetup::for_target(m.clone(), &target, &[w], delta)?,
                config,
            )
        })?;

        let mut columns = vec![grid_name];
        for name in &config.which {
            for suffix in ["extracted", "oracle", "rel_error", "v"] {
                columns.push(format!("f_{name}_{suffix}"));
            }
        }
        let mut table = Table::new(columns);
        for (x, chunk) in points.iter().zip(results.chunks(which.len())) {
            let mut row = vec![*x];
            for r in chunk {
                row.extend([r.estimate, r.oracle, r.rel_error(), r.v]);
            }
            table.push(row);
        }
        Ok(JobOutput {
            table,
            ..JobOutput::default()
        })
    }
}
