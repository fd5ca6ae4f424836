#![allow(dead_code)]

use quasisep::constitutive::{self as law, MaterialParams};
use quasisep::diagnostics::DiagnosticsRecord;
use quasisep::fields::{divergence, gradient};
use quasisep::solver::{self, chemical_potential, RunObserver, State, StepReport};
use quasisep::SolverConfig;

/// Keeps every state, record and report of a run.
#[derive(Default)]
pub struct Recorder {
    pub states: Vec<State>,
    pub records: Vec<DiagnosticsRecord>,
    pub reports: Vec<StepReport>,
}

impl RunObserver for Recorder {
    fn on_record(
        &mut self,
        _: u64,
        state: &State,
        record: &DiagnosticsRecord,
        report: Option<&StepReport>,
    ) -> quasisep::Result<()> {
        self.states.push(state.clone());
        self.records.push(record.clone());
        if let Some(r) = report {
            self.reports.push(*r);
        }
        Ok(())
    }
}

/// Relative imbalance of the discrete heat budget over one zero-velocity
/// step from `old` to `new`, recomputed term by term:
/// `sum rho C (theta' - theta)/dt` against the sum of latent, chemical,
/// conductive and supplied heat.
pub fn heat_budget_residual(old: &State, new: &State, params: &MaterialParams, dt: f64) -> f64 {
    let grid = *old.grid();
    let mu = chemical_potential(old, params).unwrap();
    let grad_mu = gradient(&mu);
    let div_q = divergence(&new.q);
    let mut imbalance = 0.0;
    let mut scale = 0.0;
    for idx in 0..grid.cell_count() {
        let (c0, c1) = (old.c.values()[idx], new.c.values()[idx]);
        let (t0, t1) = (old.theta.values()[idx], new.theta.values()[idx]);
        let rho = law::density(c1, params);
        let storage = rho * params.heat_capacity * (t1 - t0) / dt;
        let g_rate = (law::coupling_g(c1) - law::coupling_g(c0)) / dt;
        let latent = rho * (t1 + new.q.norm_sq_at(idx) / params.kappa0) * g_rate;
        let chemical = law::mobility(c0, params) * grad_mu.norm_sq_at(idx);
        let conduction = -div_q.values()[idx];
        let supply = rho * old.r.values()[idx];
        imbalance += storage - (latent + chemical + conduction + supply);
        scale += storage.abs() + latent.abs() + chemical.abs() + conduction.abs() + supply.abs();
    }
    imbalance.abs() / scale
}

/// Runs `config` from `initial`, keeping everything.
pub fn run_recorded(initial: State, params: &MaterialParams, config: &SolverConfig) -> Recorder {
    let mut rec = Recorder::default();
    solver::run(initial, params, config, &mut rec).unwrap();
    rec
}
