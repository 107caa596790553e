use qfi_core::linalg::eigenvalues;
use qfi_core::models::{build, ModelRegistry};
use qfi_core::oracle::qfi_ground;
use qfi_core::protocol::{scan_ground_crossings, ExtractionSetup};
use serde_json::json;

use super::{measure, require_ramp, require_variant, require_which, Context, Job};
use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::{JobOutput, Table};

/// Ground-state crossings of the Heisenberg ring along a grid of one model
/// constant, with the QFI extracted at each point.
///
/// Points with a degenerate ground state have no QFI; their QFI columns are
/// left empty rather than failing the scan.
pub struct HeisenbergScan;

impl Job for HeisenbergScan {
    fn name(&self) -> &'static str {
        "heisenberg-scan"
    }

    fn about(&self) -> &'static str {
        "Heisenberg ring: level crossings and the QFI step along a coupling grid"
    }

    fn defaults(&self) -> &'static str {
        r#"
params = [1.5707963267948966]
which = ["theta"]
origin = 0.0
v = 0.01
grid = { param = "j", start = -0.75, stop = -0.05, step = 0.01 }

[model]
variant = "heisenberg"
n = 4
"#
    }

    fn validate(&self, config: &RunConfig) -> Result<(), RunError> {
        require_variant(config, "heisenberg")?;
        require_which(config, 1)?;
        require_ramp(config)?;
        let Some(grid) = &config.grid else {
            return Err(RunError::config("job `heisenberg-scan` needs a `grid`"));
        };
        let family = ModelRegistry::builtin().get(&config.model.variant)?.clone();
        let numeric = family.constants().iter().any(|c| {
            c.name == grid.param && matches!(c.default, qfi_core::models::ConstValue::Number(_))
        });
        if !numeric {
            return Err(RunError::config(format!(
                "scan grid must name a numeric model constant, got `{}`",
                grid.param
            )));
        }
        if grid.points()?.len() < 2 {
            return Err(RunError::config("a scan needs at least two grid points"));
        }
        Ok(())
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError> {
        let grid = config.grid.as_ref().expect("validated");
        let key = grid.param.as_str();
        let points = grid.points()?;
        let base = config.model.spec();
        let w = config.param_index(&config.which[0])?;
        let params = &config.params;
        let scan = scan_ground_crossings(&base, key, &points, params)?;

        let in_crossing = |i: usize| -> bool {
            i + 1 < points.len()
                && scan
                    .crossings
                    .iter()
                    .any(|c| c.lo <= points[i] && points[i + 1] <= c.hi)
        };
        let indices: Vec<usize> = (0..points.len()).collect();
        let rows = ctx.map(&indices, |&i| {
            let x = points[i];
            let m = build(&base.clone().with(key, x))?;
            let energies = eigenvalues(&m.hamiltonian(params)?)?;
            let degenerate = scan.points[i].degenerate;
            let mut row = vec![x];
            row.extend((0..config.levels).map(|l| energies.get(l).copied().unwrap_or(f64::NAN)));
            row.push(scan.points[i].gap);
            let oracle = if degenerate {
                f64::NAN
            } else {
                qfi_ground(&m, params, w)?
            };
            let estimate = if degenerate || config.spectrum_only {
                f64::NAN
            } else {
                let delta = config.delta_for(params[w])?;
                match ExtractionSetup::for_target(m, params, &[w], delta)
                    .map_err(RunError::from)
                    .and_then(|s| measure(s, config))
                {
                    Ok(r) => r.estimate,
                    Err(RunError::Model(qfi_core::Error::DegenerateGroundState { .. })) => f64::NAN,
                    Err(e) => return Err(e),
                }
            };
            row.extend([
                estimate,
                oracle,
                f64::from(u8::from(degenerate)),
                f64::from(u8::from(in_crossing(i))),
            ]);
            Ok(row)
        })?;

        let mut columns = vec![key.to_string()];
        columns.extend((0..config.levels).map(|l| format!("e{l}")));
        columns.extend(
            [
                "gap",
                "qfi_extracted",
                "qfi_oracle",
                "degenerate",
                "crossing_next",
            ]
            .map(String::from),
        );
        let mut table = Table::new(columns);
        rows.into_iter().for_each(|r| table.push(r));

        let crossings = scan
            .crossings
            .iter()
            .map(|c| json!({"lo": c.lo, "hi": c.hi, "degenerate_at": c.degenerate_at}))
            .collect::<Vec<_>>();
        let summary = [("crossings".to_string(), json!(crossings))]
            .into_iter()
            .collect();
        Ok(JobOutput { table, summary })
    }
}
