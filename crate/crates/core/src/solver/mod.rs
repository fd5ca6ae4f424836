//! Operator-split time integration of the coupled velocity, concentration,
//! temperature and heat-flux system.
//!
//! One step runs, in order: chemical potential, concentration, momentum (per
//! coupling mode), heat flux, temperature. A failed step is retried with dt
//! halved, at most [`MAX_HALVINGS`] times.

mod config;
mod kernels;
mod state;

pub use config::{
    advection_scheme_name, parse_advection_scheme, CouplingMode, SolverConfig, StepReport,
};
pub use kernels::{
    chemical_potential, composition_flux_divergence, project_velocity, step_concentration,
    step_heat_flux, step_momentum, step_temperature, stress, thermal_sources, ThermalSources,
};
pub(crate) use kernels::transported_heat_flux;
pub use state::State;

use crate::constitutive::{self as law, MaterialParams};
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};

pub const MAX_HALVINGS: u32 = 5;

/// Stability numbers of the explicit parts for a step of size `dt` from `state`.
pub fn stability_numbers(state: &State, params: &MaterialParams, dt: f64) -> (f64, f64, f64) {
    let h = state.grid().min_spacing();
    let advection = dt * state.v.max_norm() / h;
    let mut kappa_over = 0.0_f64;
    let mut max_m = 0.0_f64;
    let mut max_inv_rho = 0.0_f64;
    for (&c, &theta) in state.c.values().iter().zip(state.theta.values()) {
        let rho = law::density(c, params);
        kappa_over = kappa_over.max(params.kappa0 / theta / (rho * params.heat_capacity));
        max_m = max_m.max(law::mobility(c, params));
        max_inv_rho = max_inv_rho.max(1.0 / rho);
    }
    let conduction = dt * kappa_over / (h * h);
    let cahn_hilliard = dt * max_m * params.gamma * max_inv_rho / h.powi(4);
    (advection, conduction, cahn_hilliard)
}

/// One attempt at a step of size `dt`, without retries.
pub fn try_step(state: &State, params: &MaterialParams, config: &SolverConfig, dt: f64) -> Result<State> {
    let mu = chemical_potential(state, params)?;
    let flux_div = composition_flux_divergence(&state.c, &mu, params);
    let c = step_concentration(state, &flux_div, params, config, dt)?;
    let v = step_momentum(state, &c, &flux_div, params, config, dt)?;
    let (q, theta) = if config.isothermal {
        (state.q.clone(), state.theta.clone())
    } else {
        let q = step_heat_flux(state, &c, params, config, dt)?;
        let sources = thermal_sources(&state.c, &c, &v, &mu, params, config.advection_scheme, dt);
        let theta = step_temperature(state, &c, &v, &q, &sources, params, config, dt)?;
        (q, theta)
    };
    Ok(State {
        t: state.t + dt,
        v,
        c,
        theta,
        q,
        b: state.b.clone(),
        r: state.r.clone(),
    })
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::StepFailure { .. } | Error::InvalidState { field: "theta", .. })
}

fn with_step_index(e: Error, step: u64) -> Error {
    match e {
        Error::StepFailure { field, reason, .. } => Error::StepFailure { step, field, reason },
        Error::InvalidState { field, reason } => Error::StepFailure { step, field, reason },
        other => other,
    }
}

/// Steps of size `dt` (halved on failure) from `state`; `step_index` only
/// labels errors.
pub fn step_sized(
    state: &State,
    params: &MaterialParams,
    config: &SolverConfig,
    dt: f64,
    step_index: u64,
) -> Result<(State, StepReport)> {
    let mut dt_try = dt;
    let mut halvings = 0;
    loop {
        match try_step(state, params, config, dt_try) {
            Ok(next) => {
                let (a, k, ch) = stability_numbers(state, params, dt_try);
                let max_dc = next
                    .c
                    .values()
                    .iter()
                    .zip(state.c.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                return Ok((
                    next,
                    StepReport {
                        dt_used: dt_try,
                        halvings,
                        max_dc,
                        cfl_advection: a,
                        cfl_conduction: k,
                        cfl_cahn_hilliard: ch,
                    },
                ));
            }
            Err(e) if retryable(&e) && halvings < MAX_HALVINGS => {
                halvings += 1;
                dt_try *= 0.5;
            }
            Err(e) => return Err(with_step_index(e, step_index)),
        }
    }
}

/// One step of size `config.dt`.
pub fn step(state: &State, params: &MaterialParams, config: &SolverConfig) -> Result<(State, StepReport)> {
    step_sized(state, params, config, config.dt, 0)
}

/// Receives the diagnostics of every step and the snapshots.
pub trait RunObserver {
    fn on_record(&mut self, step: u64, state: &State, record: &DiagnosticsRecord, report: Option<&StepReport>) -> Result<()>;

    fn on_snapshot(&mut self, _step: u64, _state: &State) -> Result<()> {
        Ok(())
    }
}

/// Observer that drops everything.
pub struct NullObserver;

impl RunObserver for NullObserver {
    fn on_record(&mut self, _: u64, _: &State, _: &DiagnosticsRecord, _: Option<&StepReport>) -> Result<()> {
        Ok(())
    }
}

/// Collects every diagnostics record in memory.
#[derive(Default)]
pub struct RecordCollector {
    pub records: Vec<DiagnosticsRecord>,
    pub reports: Vec<StepReport>,
}

impl RunObserver for RecordCollector {
    fn on_record(&mut self, _: u64, _: &State, record: &DiagnosticsRecord, report: Option<&StepReport>) -> Result<()> {
        self.records.push(record.clone());
        if let Some(r) = report {
            self.reports.push(*r);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: State,
    pub steps: u64,
}

/// Integrates from `initial` to `config.t_end`, recording diagnostics after
/// every step (and for the initial state).
pub fn run(
    initial: State,
    params: &MaterialParams,
    config: &SolverConfig,
    observer: &mut dyn RunObserver,
) -> Result<RunOutcome> {
    params.validate()?;
    config.validate()?;
    initial.validate()?;
    let diag = diagnostics::DiagnosticsOptions {
        advection_scheme: config.advection_scheme,
    };
    let record0 = diagnostics::record_with(&initial, params, None, &diag)?;
    observer.on_record(0, &initial, &record0, None)?;
    if config.snapshot_every > 0 {
        observer.on_snapshot(0, &initial)?;
    }
    let mut state = initial;
    let mut steps = 0_u64;
    let t_end = config.t_end;
    // accumulated roundoff in t must not add a sliver step
    let slack = 1e-6 * config.dt;
    while state.t < t_end - slack {
        let dt = config.dt.min(t_end - state.t);
        let (next, report) = step_sized(&state, params, config, dt, steps + 1)?;
        steps += 1;
        let rec = diagnostics::record_with(&next, params, Some(&state), &diag)?;
        observer.on_record(steps, &next, &rec, Some(&report))?;
        if config.snapshot_every > 0 && steps % config.snapshot_every == 0 {
            observer.on_snapshot(steps, &next)?;
        }
        state = next;
    }
    Ok(RunOutcome { state, steps })
}
