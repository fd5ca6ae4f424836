//! Per-step monitors: conserved quantities, extrema, energies, the discrete
//! Clausius-Duhem entropy production and the volume-constraint residual.
//!
//! All integrals are midpoint cell sums times the cell volume.

use crate::constitutive::{self as law, MaterialParams};
use crate::error::{Error, Result};
use crate::fields::{advect_with, divergence, gradient, symmetric_gradient, AdvectionScheme, Ghost};
use crate::solver::{chemical_potential, composition_flux_divergence, thermal_sources, transported_heat_flux, State};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `int rho c`.
    pub total_mass: f64,
    /// `int rho |c|`, the scale against which mass drift is measured.
    pub mass_magnitude: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub kinetic_energy: f64,
    pub internal_energy: f64,
    pub free_energy: f64,
    /// `int rho [theta0 F(c) + gamma/2 |grad c|^2]`.
    pub lyapunov: f64,
    /// Discrete entropy production over the last step; absent without a
    /// previous state.
    pub entropy_production: Option<f64>,
    /// L2 norm of `rho_c c_dot + rho div v`.
    pub constraint_residual: f64,
    /// Fraction of cells with `M |grad mu|^2 + gamma rho grad c . D grad c < 0`.
    pub assumption_violation_fraction: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DiagnosticsOptions {
    /// Scheme the solver used for transport terms.
    pub advection_scheme: AdvectionScheme,
}

/// Diagnostics with default options (upwind transport).
pub fn record(state: &State, params: &MaterialParams, prev: Option<&State>) -> Result<DiagnosticsRecord> {
    record_with(state, params, prev, &DiagnosticsOptions::default())
}

pub fn record_with(
    state: &State,
    params: &MaterialParams,
    prev: Option<&State>,
    options: &DiagnosticsOptions,
) -> Result<DiagnosticsRecord> {
    let grid = *state.grid();
    if let Some(p) = prev {
        if p.grid() != state.grid() {
            return Err(Error::GridMismatch("previous state lives on a different grid".into()));
        }
    }
    state.validate()?;
    let vol = grid.cell_volume();
    let n = grid.cell_count();
    let grad_c = gradient(&state.c);
    let strain = symmetric_gradient(&state.v);
    let mu = chemical_potential(state, params)?;
    let grad_mu = gradient(&mu);

    let mut total_mass = 0.0;
    let mut mass_magnitude = 0.0;
    let mut kinetic = 0.0;
    let mut internal = 0.0;
    let mut free = 0.0;
    let mut lyapunov = 0.0;
    let mut violations = 0usize;
    let mut gc = [0.0; 2];
    let mut qv = [0.0; 2];
    for idx in 0..n {
        let c = state.c.values()[idx];
        let theta = state.theta.values()[idx];
        let rho = law::density(c, params);
        for k in 0..grid.dim() {
            gc[k] = grad_c.component(k)[idx];
            qv[k] = state.q.component(k)[idx];
        }
        let gc = &gc[..grid.dim()];
        let qv = &qv[..grid.dim()];
        total_mass += rho * c;
        mass_magnitude += rho * c.abs();
        kinetic += 0.5 * rho * state.v.norm_sq_at(idx);
        internal += rho * law::internal_energy_density(theta, c, gc, params)?;
        free += rho * law::free_energy_density(theta, c, gc, qv, params)?;
        let grad2: f64 = gc.iter().map(|g| g * g).sum();
        lyapunov += rho * (params.theta0 * law::double_well_f(c) + 0.5 * params.gamma * grad2);
        let assumption = law::mobility(c, params) * grad_mu.norm_sq_at(idx)
            + params.gamma * rho * strain.quadratic_form(idx, gc, gc);
        if assumption < 0.0 {
            violations += 1;
        }
    }

    let (constraint_residual, entropy_production) = match prev {
        Some(p) if state.t > p.t => (
            constraint_residual(state, p, params)?,
            Some(entropy_production(state, p, params, options)?),
        ),
        _ => (constraint_residual(state, state, params)?, None),
    };

    Ok(DiagnosticsRecord {
        t: state.t,
        total_mass: total_mass * vol,
        mass_magnitude: mass_magnitude * vol,
        c_min: state.c.min(),
        c_max: state.c.max(),
        kinetic_energy: kinetic * vol,
        internal_energy: internal * vol,
        free_energy: free * vol,
        lyapunov: lyapunov * vol,
        entropy_production,
        constraint_residual,
        assumption_violation_fraction: violations as f64 / n as f64,
    })
}

/// `|| rho (div v - beta div(M grad mu)) ||_2`, which equals
/// `|| rho_c c_dot + rho div v ||_2` for `rho c_dot = div(M grad mu)`. The flux
/// is taken from `source`, the state the step started from.
fn constraint_residual(state: &State, source: &State, params: &MaterialParams) -> Result<f64> {
    let mu = chemical_potential(source, params)?;
    let flux_div = composition_flux_divergence(&source.c, &mu, params);
    let div_v = divergence(&state.v);
    let beta = params.specific_volume_slope();
    let sum: f64 = (0..state.grid().cell_count())
        .map(|idx| {
            let rho = law::density(state.c.values()[idx], params);
            (rho * (div_v.values()[idx] - beta * flux_div.values()[idx])).powi(2)
        })
        .sum();
    Ok((sum * state.grid().cell_volume()).sqrt())
}

/// Discrete Clausius-Duhem surplus over the step `prev -> state`:
///
/// `int rho eta_dot - int rho h / theta - int q . grad theta / theta^2
///   - int (1 / (kappa0 theta)) d/dt[(delta + G) |q|^2]`,
///
/// where `rho h` is recovered from the energy balance
/// `rho h = rho C theta_dot - sigma (div v)^2 - 2 nu D:D - rho u G_dot - M |grad mu|^2`
/// and the last term is the rate of the heat-flux part of the free energy.
/// Rates are backward differences; `1/theta` weights use the new temperature
/// and `grad theta / theta` the old one, matching the time levels of the
/// heat-flux update.
fn entropy_production(state: &State, prev: &State, params: &MaterialParams, options: &DiagnosticsOptions) -> Result<f64> {
    let grid = *state.grid();
    let dt = state.t - prev.t;
    let mu_prev = chemical_potential(prev, params)?;
    let sources = thermal_sources(&prev.c, &state.c, &state.v, &mu_prev, params, options.advection_scheme, dt);
    let grad_theta = gradient(&prev.theta);
    let q_star = transported_heat_flux(&prev.q, &prev.v, options.advection_scheme, dt);
    let moving = !state.v.is_zero();
    let (adv_log_theta, adv_theta) = if moving {
        let log_theta: Vec<f64> = prev.theta.values().iter().map(|t| t.ln()).collect();
        (
            advect_with(&log_theta, Ghost::Mirror, &state.v, options.advection_scheme),
            advect_with(prev.theta.values(), Ghost::Mirror, &state.v, options.advection_scheme),
        )
    } else {
        (vec![0.0; grid.cell_count()], vec![0.0; grid.cell_count()])
    };
    let cap = params.heat_capacity;
    let mut total = 0.0;
    for idx in 0..grid.cell_count() {
        let theta_old = prev.theta.values()[idx];
        let theta_new = state.theta.values()[idx];
        let c_new = state.c.values()[idx];
        let rho = law::density(c_new, params);
        let g_rate = sources.g_rate[idx];
        let q2_new = state.q.norm_sq_at(idx);
        let q2_star = q_star.norm_sq_at(idx);

        // rho eta_dot with eta = C ln theta - G(c)
        let log_ratio = ((theta_new - theta_old) / theta_old).ln_1p();
        let eta_rate = cap * (log_ratio / dt + adv_log_theta[idx]) - g_rate;

        let theta_rate = (theta_new - theta_old) / dt + adv_theta[idx];
        let u_new = theta_new + q2_new / params.kappa0;
        let heat = rho * cap * theta_rate - sources.viscous[idx] - rho * u_new * g_rate - sources.chemical[idx];

        let q_dot_grad: f64 = (0..grid.dim())
            .map(|k| state.q.component(k)[idx] * grad_theta.component(k)[idx])
            .sum();

        let stored = ((params.delta + law::coupling_g(c_new)) * (q2_new - q2_star) / dt + rho * q2_new * g_rate)
            / params.kappa0;

        total += rho * eta_rate - heat / theta_new - q_dot_grad / (theta_old * theta_new) - stored / theta_new;
    }
    Ok(total * grid.cell_volume())
}

/// Tolerances used to certify a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPolicy {
    /// Allowed relative drift of `int rho c`.
    pub mass_drift: f64,
    /// Allowed excursion of `c` beyond `[-1, 1]`; `None` skips the check.
    pub c_overshoot: Option<f64>,
    /// Lowest admissible entropy production.
    pub entropy_floor: f64,
    /// Allowed relative increase of the Lyapunov functional per step; `None`
    /// skips the check.
    pub lyapunov_increase: Option<f64>,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy {
            mass_drift: 1e-11,
            c_overshoot: Some(1e-3),
            entropy_floor: -1e-9,
            lyapunov_increase: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub name: &'static str,
    pub detail: String,
}

/// Relative drift of `int rho c` against a reference record. A mixture with
/// near-zero net composition is measured against `int rho |c|`.
pub fn relative_mass_drift(record: &DiagnosticsRecord, reference: &DiagnosticsRecord) -> f64 {
    let scale = reference
        .total_mass
        .abs()
        .max(reference.mass_magnitude)
        .max(f64::MIN_POSITIVE);
    (record.total_mass - reference.total_mass).abs() / scale
}

/// Named threshold violations of `record`; empty means the step is certified.
pub fn check_thresholds(
    record: &DiagnosticsRecord,
    reference: Option<&DiagnosticsRecord>,
    previous: Option<&DiagnosticsRecord>,
    policy: &ThresholdPolicy,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Some(r) = reference {
        let drift = relative_mass_drift(record, r);
        if !(drift <= policy.mass_drift) {
            out.push(Violation {
                name: "mass-drift",
                detail: format!("relative drift {drift:e} exceeds {:e}", policy.mass_drift),
            });
        }
    }
    if let Some(eps) = policy.c_overshoot {
        let (lo, hi) = (-1.0 - eps, 1.0 + eps);
        if !(record.c_min >= lo && record.c_max <= hi) {
            out.push(Violation {
                name: "maximum-principle",
                detail: format!("c in [{}, {}] leaves [{lo}, {hi}]", record.c_min, record.c_max),
            });
        }
    }
    if let Some(s) = record.entropy_production {
        if !(s >= policy.entropy_floor) {
            out.push(Violation {
                name: "second-law",
                detail: format!("entropy production {s:e} below {:e}", policy.entropy_floor),
            });
        }
    }
    if let (Some(tol), Some(p)) = (policy.lyapunov_increase, previous) {
        let allowed = tol * p.lyapunov.abs().max(f64::MIN_POSITIVE);
        if !(record.lyapunov - p.lyapunov <= allowed) {
            out.push(Violation {
                name: "lyapunov",
                detail: format!("functional grew from {} to {}", p.lyapunov, record.lyapunov),
            });
        }
    }
    out
}
