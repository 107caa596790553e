use qfi_core::oracle::{qfi_ground, tfim_qfi_analytic};
use qfi_core::protocol::{relative_error, ExtractionSetup};

use super::{measure, model, param_grid, require_ramp, require_variant, with_value, Context, Job};
use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::{JobOutput, Table};

/// Field-QFI curve of the transverse-field Ising ring against the closed form.
pub struct TfimCurve;

impl Job for TfimCurve {
    fn name(&self) -> &'static str {
        "tfim-curve"
    }

    fn about(&self) -> &'static str {
        "Transverse-field Ising F_B along a field grid, extracted and closed form"
    }

    fn defaults(&self) -> &'static str {
        r#"
params = [10.0]
which = ["b"]
origin = 5.0
grid = { param = "b", start = 6.0, stop = 14.0, step = 0.5 }

[model]
variant = "tfim"
j = 10.0
n = 4
"#
    }

    fn validate(&self, config: &RunConfig) -> Result<(), RunError> {
        require_variant(config, "tfim")?;
        if config.grid.as_ref().is_some_and(|g| g.param != "b") {
            return Err(RunError::config("job `tfim-curve` grids the field `b`"));
        }
        require_ramp(config)
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError> {
        let m = model(config)?;
        let consts = &m.spec().constants;
        let number = |k: &str| match consts.get(k) {
            Some(qfi_core::models::ConstValue::Number(x)) => Ok(*x),
            _ => Err(RunError::config(format!(
                "model constant `{k}` must be a number"
            ))),
        };
        let (j, n) = (number("j")?, number("n")? as usize);
        let (_, k, points) = param_grid(config, "b")?;
        let rows = ctx.map(&points, |&b| {
            let target = with_value(&config.params, k, b);
            let delta = config.delta_for(b)?;
            let setup = ExtractionSetup::for_target(m.clone(), &target, &[k], delta)?;
            let r = measure(setup, config)?;
            let analytic = tfim_qfi_analytic(j, b, n)?;
            Ok(vec![
                b,
                r.estimate,
                analytic,
                relative_error(r.estimate, analytic).unwrap_or(f64::NAN),
                qfi_ground(&m, &target, k)?,
                r.v,
                r.sah,
                r.variance,
            ])
        })?;
        let mut table = Table::new([
            "B",
            "qfi_extracted",
            "qfi_analytic",
            "rel_error",
            "qfi_exact",
            "v",
            "sah",
            "variance",
        ]);
        rows.into_iter().for_each(|r| table.push(r));
        Ok(JobOutput {
            table,
            ..JobOutput::default()
        })
    }
}
