use qfi_core::protocol::ExtractionSetup;

use super::{
    measure, model, param_grid, require_ramp, require_which, with_value, Context, Job, Measured,
};
use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::{JobOutput, Table};

/// Protocol estimate of one parameter's QFI at each grid point.
pub struct Extract;

impl Job for Extract {
    fn name(&self) -> &'static str {
        "extract"
    }

    fn about(&self) -> &'static str {
        "QFI from the energy fluctuation after a quadratic ramp"
    }

    fn defaults(&self) -> &'static str {
        r#"
params = [1.5707963267948966, 0.0]
which = ["theta"]
origin = 0.0
v = 0.02

[model]
variant = "two-level"
"#
    }

    fn validate(&self, config: &RunConfig) -> Result<(), RunError> {
        require_which(config, 1)?;
        require_ramp(config)
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError> {
        let m = model(config)?;
        let w = config.param_index(&config.which[0])?;
        let (grid_name, k, points) = param_grid(config, &config.which[0])?;
        let rows = ctx.map(&points, |&x| {
            let target = with_value(&config.params, k, x);
            let delta = config.delta_for(target[w])?;
            let setup = ExtractionSetup::for_target(m.clone(), &target, &[w], delta)?;
            let mut row = vec![x];
            row.extend(measure(setup, config)?.row());
            Ok(row)
        })?;
        let mut table = Table::new(std::iter::once(grid_name.as_str()).chain(Measured::COLUMNS));
        rows.into_iter().for_each(|r| table.push(r));
        Ok(JobOutput {
            table,
            ..JobOutput::default()
        })
    }
}
