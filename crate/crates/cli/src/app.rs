//! Argument parsing, job dispatch and output files.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgMatches, Args, Command, FromArgMatches};

use crate::config::{resolve, Format, Overrides, RunConfig};
use crate::error::RunError;
use crate::jobs::{parse_defaults, Context, Job, JobRegistry};
use crate::record::ResultRecord;

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; one per processor by default.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// Fixed number of propagation steps.
    #[arg(long, value_name = "N")]
    pub steps: Option<usize>,
    /// Single final ramp rate.
    #[arg(long = "v", value_name = "RATE")]
    pub v: Option<f64>,
    /// Comma-separated rates for a sweep.
    #[arg(long = "v-list", value_name = "RATES", value_delimiter = ',')]
    pub v_list: Option<Vec<f64>>,
    /// Config override, e.g. `--set model.n=8` or `--set v=0.01`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            set: self.set.clone(),
            out: self.out.clone(),
            format: self.format,
            steps: self.steps,
            v: self.v,
            v_list: self.v_list.clone(),
        }
    }
}

pub fn command(registry: &JobRegistry) -> Command {
    let mut cmd = Command::new("qfi")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Quantum Fisher information from quasi-adiabatic energy fluctuations")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for job in registry.jobs() {
        cmd = cmd.subcommand(RunArgs::augment_args(Command::new(job.name())).about(job.about()));
    }
    cmd
}

/// Resolves the config for `job` from its defaults, the file and overrides.
pub fn resolve_config(job: &dyn Job, args: &RunArgs) -> Result<RunConfig, RunError> {
    let config = resolve(
        job.name(),
        parse_defaults(job.defaults()),
        args.config.as_deref(),
        &args.overrides(),
    )?;
    job.validate(&config)?;
    Ok(config)
}

/// Runs a resolved config and returns the record without writing anything.
pub fn run(
    registry: &JobRegistry,
    config: RunConfig,
    threads: Option<usize>,
) -> Result<ResultRecord, RunError> {
    let job = registry.get(&config.job)?;
    job.validate(&config)?;
    let ctx = Context::new(threads)?;
    let start = Instant::now();
    log::info!("running `{}` on {} thread(s)", config.job, ctx.threads());
    let output = job.run(&config, &ctx)?;
    Ok(ResultRecord::new(
        config,
        output,
        start.elapsed().as_secs_f64(),
    ))
}

/// Where the JSON sidecar of a CSV file goes: `x.csv` → `x.json`,
/// anything else gains a `.json` suffix.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    if csv.extension().is_some_and(|e| e == "csv") {
        csv.with_extension("json")
    } else {
        let mut s = csv.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), RunError> {
    let file = File::create(path).map_err(|e| RunError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| RunError::io(path, e))
}

/// Writes the record as configured: CSV plus a JSON sidecar, or JSON alone.
/// Without a path the primary document goes to standard output.
pub fn write_outputs(record: &ResultRecord) -> Result<(), RunError> {
    let output = &record.config.output;
    match (&output.path, output.format) {
        (Some(path), Format::Csv) => {
            let sidecar = sidecar_path(path);
            write_file(path, |w| record.write_csv(w))?;
            write_file(&sidecar, |w| writeln!(w, "{}", record.to_json()))
        }
        (Some(path), Format::Json) => write_file(path, |w| writeln!(w, "{}", record.to_json())),
        (None, Format::Csv) => record
            .write_csv(std::io::stdout().lock())
            .map_err(|e| RunError::io("<stdout>", e)),
        (None, Format::Json) => writeln!(std::io::stdout().lock(), "{}", record.to_json())
            .map_err(|e| RunError::io("<stdout>", e)),
    }
}

fn dispatch(registry: &JobRegistry, matches: &ArgMatches) -> Result<(), RunError> {
    let (name, sub) = matches
        .subcommand()
        .ok_or_else(|| RunError::config("no subcommand given"))?;
    let job = registry.get(name)?;
    let args = RunArgs::from_arg_matches(sub).map_err(|e| RunError::config(e.to_string()))?;
    let config = resolve_config(job.as_ref(), &args)?;
    let record = run(registry, config, args.jobs)?;
    write_outputs(&record)
}

/// Parses `argv`, runs the job and returns the process exit code. Failures
/// print a one-line JSON error record to standard error.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let registry = JobRegistry::builtin();
    let matches = match command(&registry).try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = RunError::config(e.to_string().trim().to_string());
            eprintln!("{}", err.record());
            return err.exit_code();
        }
    };
    match dispatch(&registry, &matches) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", err.record());
            err.exit_code()
        }
    }
}
