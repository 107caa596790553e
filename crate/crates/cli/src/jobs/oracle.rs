use qfi_core::oracle::{qfi_ground, qfim_ground};

use super::{model, param_grid, with_value, Context, Job};
use crate::config::RunConfig;
use crate::error::RunError;
use crate::record::{JobOutput, Table};

/// Spectral QFI (one name in `which`) or QFIM entries (several) along a grid.
pub struct Oracle;

/// Column label for the QFIM entry of `a` and `b`.
pub(crate) fn entry_label(a: &str, b: &str) -> String {
    if a.len() == 1 && b.len() == 1 {
        format!("f_{a}{b}")
    } else {
        format!("f_{a}_{b}")
    }
}

impl Job for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn about(&self) -> &'static str {
        "Ground-state QFI from the spectral sum, no dynamics"
    }

    fn defaults(&self) -> &'static str {
        r#"
params = [1.5707963267948966, 0.0]
which = ["theta"]

[model]
variant = "two-level"
"#
    }

    fn validate(&self, config: &RunConfig) -> Result<(), RunError> {
        if config.which.is_empty() {
            return Err(RunError::config(
                "job `oracle` needs at least one name in `which`",
            ));
        }
        Ok(())
    }

    fn run(&self, config: &RunConfig, ctx: &Context) -> Result<JobOutput, RunError> {
        let m = model(config)?;
        let (grid_name, k, points) = param_grid(config, &config.which[0])?;
        let which: Vec<usize> = config
            .which
            .iter()
            .map(|w| config.param_index(w))
            .collect::<Result<_, _>>()?;

        let mut columns = vec![grid_name];
        if which.len() == 1 {
            columns.push("qfi".into());
        } else {
            for a in 0..which.len() {
                for b in a..which.len() {
                    columns.push(entry_label(&config.which[a], &config.which[b]));
                }
            }
        }
        let rows = ctx.map(&points, |&x| {
            let p = with_value(&config.params, k, x);
            let mut row = vec![x];
            if let [w] = which[..] {
                row.push(qfi_ground(&m, &p, w)?);
            } else {
                let f = qfim_ground(&m, &p, &which)?;
                for a in 0..which.len() {
                    for b in a..which.len() {
                        row.push(f.get(a, b));
                    }
                }
            }
            Ok(row)
        })?;
        let mut table = Table::new(columns);
        rows.into_iter().for_each(|r| table.push(r));
        Ok(JobOutput {
            table,
            ..JobOutput::default()
        })
    }
}
