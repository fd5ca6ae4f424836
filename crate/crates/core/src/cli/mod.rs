//! Configuration, scenario presets, output writers and the command-line
//! driver.
//!
//! Exit codes of [`main_with_args`]: 0 for a completed run without threshold
//! violations, 2 for a completed run with violations, 1 for any error
//! (including usage errors).

pub mod config;
pub mod output;
pub mod rng;
pub mod scenario;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

pub use config::{parse_assignments, parse_config, Assignment, GridSpec, OutputSpec, RunConfig, ScenarioKind, ScenarioParams};
pub use output::{emit_diagnostics_row, emit_snapshot, read_snapshot, Snapshot, CSV_HEADER};
pub use scenario::build_scenario;

use crate::diagnostics::{check_thresholds, DiagnosticsRecord, ThresholdPolicy, Violation};
use crate::error::{Error, Result};
use crate::solver::{self, CouplingMode, RunObserver, State, StepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATIONS: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "quasisep", version, about = "Non-isothermal phase separation with Cattaneo-Maxwell heat flux")]
pub struct Args {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "PATH", required_unless_present = "scenario")]
    pub config: Option<PathBuf>,
    /// Scenario preset: spinodal_1d, spinodal_2d, heat_pulse, flux_induced_mixing.
    #[arg(long, value_name = "NAME")]
    pub scenario: Option<String>,
    #[arg(long, value_name = "N")]
    pub nx: Option<usize>,
    #[arg(long, value_name = "N")]
    pub ny: Option<usize>,
    #[arg(long, value_name = "X")]
    pub dt: Option<f64>,
    #[arg(long = "t-end", value_name = "X")]
    pub t_end: Option<f64>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Coupling mode: zero_velocity, constitutive_pressure, constrained_divergence.
    #[arg(long, value_name = "NAME")]
    pub mode: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long = "snapshot-every", value_name = "N")]
    pub snapshot_every: Option<u64>,
}

impl Args {
    /// Flags as config assignments, in the order they override the file.
    pub fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        push("scenario", self.scenario.clone());
        push("grid.nx", self.nx.map(|v| v.to_string()));
        push("grid.ny", self.ny.map(|v| v.to_string()));
        push("solver.dt", self.dt.map(|v| v.to_string()));
        push("solver.t_end", self.t_end.map(|v| v.to_string()));
        push("solver.seed", self.seed.map(|v| v.to_string()));
        push("solver.mode", self.mode.clone());
        push("output.dir", self.out.as_ref().map(|p| p.display().to_string()));
        push("solver.snapshot_every", self.snapshot_every.map(|v| v.to_string()));
        out
    }

    /// Resolves the layered configuration.
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse_assignments(&text)?
            }
            None => Vec::new(),
        };
        RunConfig::layered(&file, &self.overrides())
    }
}

/// Threshold policy for a run. The range of `c` is certified only without
/// flow, and the Lyapunov check applies only to the isothermal zero-velocity
/// configuration.
pub fn policy_for(config: &RunConfig) -> ThresholdPolicy {
    let still = config.solver.coupling_mode == CouplingMode::ZeroVelocity;
    let defaults = ThresholdPolicy::default();
    ThresholdPolicy {
        c_overshoot: if still { defaults.c_overshoot } else { None },
        lyapunov_increase: (still && config.solver.isothermal).then_some(1e-10),
        ..defaults
    }
}

/// Outcome of a completed run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub final_state: State,
    pub steps: u64,
    /// Threshold violations with the step they occurred at.
    pub violations: Vec<(u64, Violation)>,
}

struct CliObserver<'a> {
    config: &'a RunConfig,
    policy: ThresholdPolicy,
    csv: Option<BufWriter<File>>,
    csv_path: PathBuf,
    reference: Option<DiagnosticsRecord>,
    previous: Option<DiagnosticsRecord>,
    violations: Vec<(u64, Violation)>,
}

impl CliObserver<'_> {
    fn snapshot_path(&self, step: u64) -> PathBuf {
        self.config.output.dir.join(format!("snapshot_{step:06}.vtk"))
    }
}

impl RunObserver for CliObserver<'_> {
    fn on_record(&mut self, step: u64, _: &State, record: &DiagnosticsRecord, _: Option<&StepReport>) -> Result<()> {
        if let Some(w) = self.csv.as_mut() {
            emit_diagnostics_row(step, record, w).map_err(|e| Error::io(&self.csv_path, e))?;
        }
        let reference = self.reference.get_or_insert_with(|| record.clone());
        for v in check_thresholds(record, Some(reference), self.previous.as_ref(), &self.policy) {
            self.violations.push((step, v));
        }
        self.previous = Some(record.clone());
        Ok(())
    }

    fn on_snapshot(&mut self, step: u64, state: &State) -> Result<()> {
        if self.config.output.snapshots {
            emit_snapshot(state, &self.config.material, &self.snapshot_path(step))?;
        }
        Ok(())
    }
}

/// Runs a resolved configuration and writes its outputs.
///
/// Snapshots go to `snapshot_NNNNNN.vtk` every `snapshot_every` steps; with
/// `snapshot_every = 0` only the initial and final states are written.
pub fn execute(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let dir = &config.output.dir;
    if config.output.csv || config.output.snapshots {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let csv_path = dir.join("diagnostics.csv");
    let csv = if config.output.csv {
        let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{CSV_HEADER}").map_err(|e| Error::io(&csv_path, e))?;
        Some(w)
    } else {
        None
    };
    let initial = build_scenario(config)?;
    let mut observer = CliObserver {
        config,
        policy: policy_for(config),
        csv,
        csv_path: csv_path.clone(),
        reference: None,
        previous: None,
        violations: Vec::new(),
    };
    if config.solver.snapshot_every == 0 {
        observer.on_snapshot(0, &initial)?;
    }
    let outcome = solver::run(initial, &config.material, &config.solver, &mut observer)?;
    if config.solver.snapshot_every == 0 && outcome.steps > 0 {
        observer.on_snapshot(outcome.steps, &outcome.state)?;
    }
    if let Some(mut w) = observer.csv.take() {
        w.flush().map_err(|e| Error::io(&csv_path, e))?;
    }
    Ok(RunSummary {
        final_state: outcome.state,
        steps: outcome.steps,
        violations: observer.violations,
    })
}

/// Command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
        }
    };
    let result = args.resolve().and_then(|cfg| execute(&cfg));
    match result {
        Ok(summary) if summary.violations.is_empty() => {
            eprintln!("completed {} steps, all thresholds satisfied", summary.steps);
            EXIT_OK
        }
        Ok(summary) => {
            for (step, v) in summary.violations.iter().take(10) {
                eprintln!("step {step}: {} violation: {}", v.name, v.detail);
            }
            if summary.violations.len() > 10 {
                eprintln!("... {} violations in total", summary.violations.len());
            }
            EXIT_VIOLATIONS
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
