use qfi_core::oracle::qfim_ground;
use qfi_core::protocol::{qfim_offdiagonal, relative_error, ExtractionSetup};

use super::oracle::entry_label;
use super::{measure, model, param_grid, require_which, with_value, Context, Job};
use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::{JobOutput, Table};

/// Both parameters of a pair ramped together from `params` by the same
/// `delta`. The joint run estimates the QFIM block sum; single-parameter runs
/// at the same target give the diagonal, and their difference the
/// off-diagonal entry.
pub struct QfimSum;

impl Job for QfimSum {
    fn name(&self) -> &'static str {
        "qfim-sum"
    }

    fn about(&self) -> &'static str {
        "QFIM block sum from a joint two-parameter ramp, with the off-diagonal entry"
    }

    fn defaults(&self) -> &'static str {
        r#"
params = [0.7853981633974483, 0.0]
which = ["x", "y"]
delta = 1.5707963267948966
v = 0.02

[model]
variant = "two-param"
"#
    }

    fn validate(&self, config: &RunConfig) -> Result<(), RunError> {
        require_which(config, 2)?;
        if config.which[0] == config.which[1] {
            return Err(RunError::config(
                "`which` must name two different parameters",
            ));
        }
        if config.delta.is_none() {
            return Err(RunError::config("job `qfim-sum` needs a shared `delta`"));
        }
        Ok(())
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError> {
        let m = model(config)?;
        let delta = config.delta_for(0.0)?;
        let pair = [
            config.param_index(&config.which[0])?,
            config.param_index(&config.which[1])?,
        ];
        let (grid_name, k, points) = param_grid(config, &config.which[0])?;
        let (a, b) = (&config.which[0], &config.which[1]);
        let columns = vec![
            grid_name,
            "v".into(),
            "sah".into(),
            "variance".into(),
            "sum_extracted".into(),
            "sum_oracle".into(),
            "sum_rel_error".into(),
            format!("{}_extracted", entry_label(a, a)),
            format!("{}_oracle", entry_label(a, a)),
            format!("{}_extracted", entry_label(b, b)),
            format!("{}_oracle", entry_label(b, b)),
            format!("{}_extracted", entry_label(a, b)),
            format!("{}_oracle", entry_label(a, b)),
            format!("{}_abs_error", entry_label(a, b)),
        ];

        let rows = ctx.map(&points, |&x| {
            let start = with_value(&config.params, k, x);
            let joint = ExtractionSetup::new(m.clone(), &start, &pair, delta)?;
            let target = joint.target().to_vec();
            let sum = measure(joint, config)?;
            let diag = |w: usize| -> Result<f64, RunError> {
                let setup = ExtractionSetup::for_target(m.clone(), &target, &[w], delta)?;
                Ok(measure(setup, config)?.estimate)
            };
            let (fa, fb) = (diag(pair[0])?, diag(pair[1])?);
            let f = qfim_ground(&m, &target, &pair)?;
            let off = qfim_offdiagonal(sum.estimate, fa, fb);
            Ok(vec![
                x,
                sum.v,
                sum.sah,
                sum.variance,
                sum.estimate,
                f.block_sum(),
                relative_error(sum.estimate, f.block_sum()).unwrap_or(f64::NAN),
                fa,
                f.get(0, 0),
                fb,
                f.get(1, 1),
                off,
                f.get(0, 1),
                (off - f.get(0, 1)).abs(),
            ])
        })?;
        let mut table = Table::new(columns);
        rows.into_iter().for_each(|r| table.push(r));
        Ok(JobOutput {
            table,
            ..JobOutput::default()
        })
    }
}
