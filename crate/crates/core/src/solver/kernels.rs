//! The individual sub-steps of one time step.

use crate::constitutive::{self as law, MaterialParams};
use crate::error::{Error, Result};
use crate::fields::{
    advect_with, divergence, divergence_flux, divergence_flux_with, divergence_tensor, gradient, symmetric_gradient,
    transport_divergence, AdvectionScheme, FaceAverage, Ghost, ScalarField, SymmetricTensorField, VectorField,
};
use crate::linalg::{conjugate_gradient, solve_biharmonic_shift};

use super::config::{CouplingMode, SolverConfig};
use super::state::State;

fn step_failure(field: &'static str, reason: impl Into<String>) -> Error {
    // step index is filled in by the driver
    Error::StepFailure {
        step: 0,
        field,
        reason: reason.into(),
    }
}

fn check_positive_theta(theta: &ScalarField) -> Result<()> {
    match theta.values().iter().find(|&&t| !(t > 0.0)) {
        Some(t) => Err(Error::invalid_state(
            "theta",
            format!("absolute temperature must be positive, got {t}"),
        )),
        None => Ok(()),
    }
}

/// `mu = -(gamma/rho) div(rho grad c) + theta0 F'(c) + (theta + |q|^2/kappa0) G'(c)`.
pub fn chemical_potential(state: &State, params: &MaterialParams) -> Result<ScalarField> {
    check_positive_theta(&state.theta)?;
    let rho = state.c.map(|c| law::density(c, params));
    let capillary = divergence_flux(&rho, &state.c);
    let q2 = state.q.norm_sq();
    let values = state
        .c
        .values()
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let u = state.theta.values()[k] + q2.values()[k] / params.kappa0;
            -params.gamma / rho.values()[k] * capillary.values()[k]
                + params.theta0 * law::double_well_f_prime(c)
                + u * law::coupling_g_prime(c)
        })
        .collect();
    ScalarField::from_values(*state.grid(), values)
}

/// `div(M(c) grad mu)`, the composition flux divergence. The face mobility is
/// the harmonic mean, so no flux crosses a face next to a pure cell.
pub fn composition_flux_divergence(c: &ScalarField, mu: &ScalarField, params: &MaterialParams) -> ScalarField {
    let m = c.map(|c| law::mobility(c, params));
    divergence_flux_with(&m, mu, FaceAverage::Harmonic)
}

/// Advances the order parameter.
///
/// The conserved density `rho(c) c` is updated in flux form,
/// `(rho c)^{n+1} - (rho c)^n + dt S L^2 [(rho c)^{n+1} - (rho c)^n]
///   = dt [div(M grad mu) - div(rho c v)]`,
/// with `S = A gamma M0 / min(d(rho c)/dc)` and `L` the Neumann Laplacian,
/// then mapped back to `c`. Every term is a telescoping flux difference, so
/// `sum rho c` is preserved to roundoff.
pub fn step_concentration(
    state: &State,
    flux_div: &ScalarField,
    params: &MaterialParams,
    config: &SolverConfig,
    dt: f64,
) -> Result<ScalarField> {
    let grid = *state.grid();
    let m: Vec<f64> = state
        .c
        .values()
        .iter()
        .map(|&c| law::composition_density(c, params))
        .collect();
    let mut rhs: Vec<f64> = flux_div.values().iter().map(|d| dt * d).collect();
    if config.coupling_mode != CouplingMode::ZeroVelocity && !state.v.is_zero() {
        let transport = transport_divergence(&m, &state.v, config.advection_scheme);
        for (r, t) in rhs.iter_mut().zip(transport) {
            *r -= dt * t;
        }
    }
    let shift = dt * config.ch_stabilization * params.gamma * params.m0 / law::min_composition_slope(params);
    let dm = solve_biharmonic_shift(&grid, shift, &rhs, config.solver_tolerance).map_err(|f| {
        step_failure(
            "c",
            format!(
                "implicit stabilization solve stalled after {} iterations (residual {:e})",
                f.iterations, f.residual
            ),
        )
    })?;
    let values: Vec<f64> = state
        .c
        .values()
        .iter()
        .zip(m.iter().zip(&dm))
        .map(|(&c, (&m, &d))| {
            if d == 0.0 {
                c
            } else {
                c + (law::concentration_from_composition(m + d, params)
                    - law::concentration_from_composition(m, params))
            }
        })
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(step_failure("c", "non-finite concentration"));
    }
    ScalarField::from_values(grid, values)
}

/// Componentwise `(v . grad) u`.
pub(crate) fn advect_vector(u: &VectorField, v: &VectorField, ghost: Ghost, scheme: AdvectionScheme) -> VectorField {
    let comps = u
        .components()
        .iter()
        .map(|comp| advect_with(comp, ghost, v, scheme))
        .collect();
    VectorField::from_components(*u.grid(), comps).expect("advection shape")
}

/// Stress `-p I - gamma rho grad c (x) grad c + 2 nu D + sigma (div v) I`;
/// the pressure term is left out when `with_pressure` is false.
pub fn stress(
    c: &ScalarField,
    v: &VectorField,
    params: &MaterialParams,
    with_pressure: bool,
) -> SymmetricTensorField {
    let grid = *c.grid();
    let d = grid.dim();
    let grad_c = gradient(c);
    let strain = symmetric_gradient(v);
    let div_v = divergence(v);
    let mut t = SymmetricTensorField::zeros(grid);
    for k in 0..d {
        for l in k..d {
            let dst = t.get_mut(k, l);
            for (idx, out) in dst.iter_mut().enumerate() {
                let cv = c.values()[idx];
                let rho = law::density(cv, params);
                let mut s = -params.gamma * rho * grad_c.component(k)[idx] * grad_c.component(l)[idx]
                    + 2.0 * law::viscosity_nu(cv, params) * strain.get(k, l, idx);
                if k == l {
                    s += law::viscosity_sigma(cv, params) * div_v.values()[idx];
                    if with_pressure {
                        s -= law::pressure(cv, params);
                    }
                }
                *out = s;
            }
        }
    }
    t
}

/// Explicit momentum update with no-slip walls, followed by the projection in
/// [`CouplingMode::ConstrainedDivergence`]. `c` is the freshly updated order
/// parameter and `flux_div` the composition flux divergence of this step.
pub fn step_momentum(
    state: &State,
    c: &ScalarField,
    flux_div: &ScalarField,
    params: &MaterialParams,
    config: &SolverConfig,
    dt: f64,
) -> Result<VectorField> {
    let grid = *state.grid();
    if config.coupling_mode == CouplingMode::ZeroVelocity {
        return Ok(VectorField::zeros(grid));
    }
    let constrained = config.coupling_mode == CouplingMode::ConstrainedDivergence;
    let t = stress(c, &state.v, params, !constrained);
    let force = divergence_tensor(&t);
    let inertia = advect_vector(&state.v, &state.v, Ghost::Reflect, config.advection_scheme);
    let mut comps = Vec::with_capacity(grid.dim());
    for k in 0..grid.dim() {
        let comp: Vec<f64> = (0..grid.cell_count())
            .map(|idx| {
                let rho = law::density(c.values()[idx], params);
                let accel = force.component(k)[idx] / rho + state.b.component(k)[idx]
                    - inertia.component(k)[idx];
                state.v.component(k)[idx] + dt * accel
            })
            .collect();
        comps.push(comp);
    }
    let mut v = VectorField::from_components(grid, comps)?;
    if constrained {
        v = project_velocity(&v, flux_div, params, config)?;
    }
    if !v.all_finite() {
        return Err(step_failure("v", "non-finite velocity"));
    }
    Ok(v)
}

/// Removes a gradient so that `div v = beta div(M grad mu)` holds.
pub fn project_velocity(
    v: &VectorField,
    flux_div: &ScalarField,
    params: &MaterialParams,
    config: &SolverConfig,
) -> Result<VectorField> {
    let grid = *v.grid();
    let beta = params.specific_volume_slope();
    let div_v = divergence(v);
    // -div grad phi = -(div v - target), positive semidefinite
    let mut rhs: Vec<f64> = div_v
        .values()
        .iter()
        .zip(flux_div.values())
        .map(|(d, j)| -(d - beta * j))
        .collect();
    let mean = rhs.iter().sum::<f64>() / rhs.len() as f64;
    rhs.iter_mut().for_each(|r| *r -= mean);
    let apply = |x: &[f64]| {
        let phi = ScalarField::from_values(grid, x.to_vec()).expect("shape");
        divergence(&gradient(&phi)).values().iter().map(|v| -v).collect::<Vec<_>>()
    };
    let phi = conjugate_gradient(apply, &rhs, config.solver_tolerance, 20 * grid.cell_count())
        .map_err(|f| {
            step_failure(
                "v",
                format!(
                    "projection solve stalled after {} iterations (residual {:e})",
                    f.iterations, f.residual
                ),
            )
        })?;
    let grad_phi = gradient(&ScalarField::from_values(grid, phi)?);
    let comps = (0..grid.dim())
        .map(|k| {
            v.component(k)
                .iter()
                .zip(grad_phi.component(k))
                .map(|(a, g)| a - g)
                .collect()
        })
        .collect();
    VectorField::from_components(grid, comps)
}

/// Heat flux after advection over one step, `q - dt (v . grad) q`.
pub(crate) fn transported_heat_flux(q: &VectorField, v: &VectorField, scheme: AdvectionScheme, dt: f64) -> VectorField {
    if v.is_zero() {
        return q.clone();
    }
    let adv = advect_vector(q, v, Ghost::Mirror, scheme);
    let comps = (0..q.grid().dim())
        .map(|k| {
            q.component(k)
                .iter()
                .zip(adv.component(k))
                .map(|(a, b)| a - dt * b)
                .collect()
        })
        .collect();
    VectorField::from_components(*q.grid(), comps).expect("shape")
}

/// Pointwise implicit Cattaneo relaxation,
/// `[2(delta+G)/dt + 1] q' = 2(delta+G)/dt q* - kappa(theta) grad theta`.
pub fn step_heat_flux(
    state: &State,
    c: &ScalarField,
    params: &MaterialParams,
    config: &SolverConfig,
    dt: f64,
) -> Result<VectorField> {
    check_positive_theta(&state.theta)?;
    let grid = *state.grid();
    let grad_theta = gradient(&state.theta);
    let q_star = if config.coupling_mode == CouplingMode::ZeroVelocity {
        state.q.clone()
    } else {
        transported_heat_flux(&state.q, &state.v, config.advection_scheme, dt)
    };
    let comps = (0..grid.dim())
        .map(|k| {
            (0..grid.cell_count())
                .map(|idx| {
                    let relax = 2.0 * (params.delta + law::coupling_g(c.values()[idx])) / dt;
                    let kappa = params.kappa0 / state.theta.values()[idx];
                    (relax * q_star.component(k)[idx] - kappa * grad_theta.component(k)[idx]) / (relax + 1.0)
                })
                .collect()
        })
        .collect();
    let q = VectorField::from_components(grid, comps)?;
    if !q.all_finite() {
        return Err(step_failure("q", "non-finite heat flux"));
    }
    Ok(q)
}

/// Per-cell source terms of the temperature equation that do not involve the
/// new temperature.
#[derive(Debug, Clone)]
pub struct ThermalSources {
    /// `sigma (div v)^2 + 2 nu D:D`.
    pub viscous: Vec<f64>,
    /// `M(c) |grad mu|^2`.
    pub chemical: Vec<f64>,
    /// `dG/dt` along the motion: `(G(c') - G(c))/dt + v' . grad G(c)`.
    pub g_rate: Vec<f64>,
}

pub fn thermal_sources(
    c_old: &ScalarField,
    c_new: &ScalarField,
    v_new: &VectorField,
    mu: &ScalarField,
    params: &MaterialParams,
    scheme: AdvectionScheme,
    dt: f64,
) -> ThermalSources {
    let grid = *c_old.grid();
    let n = grid.cell_count();
    let viscous = if v_new.is_zero() {
        vec![0.0; n]
    } else {
        let strain = symmetric_gradient(v_new);
        let div_v = divergence(v_new);
        (0..n)
            .map(|idx| {
                let c = c_new.values()[idx];
                law::viscosity_sigma(c, params) * div_v.values()[idx].powi(2)
                    + 2.0 * law::viscosity_nu(c, params) * strain.contract_self(idx)
            })
            .collect()
    };
    let grad_mu = gradient(mu);
    let chemical = (0..n)
        .map(|idx| law::mobility(c_old.values()[idx], params) * grad_mu.norm_sq_at(idx))
        .collect();
    let g_old: Vec<f64> = c_old.values().iter().map(|&c| law::coupling_g(c)).collect();
    let mut g_rate: Vec<f64> = c_new
        .values()
        .iter()
        .zip(&g_old)
        .map(|(&c, g)| (law::coupling_g(c) - g) / dt)
        .collect();
    if !v_new.is_zero() {
        let adv = advect_with(&g_old, Ghost::Mirror, v_new, scheme);
        g_rate.iter_mut().zip(adv).for_each(|(r, a)| *r += a);
    }
    ThermalSources {
        viscous,
        chemical,
        g_rate,
    }
}

/// Temperature update
/// `rho C (theta' - theta)/dt + rho C v.grad theta = sigma (div v)^2 + 2 nu D:D
///   + rho (theta' + |q|^2/kappa0) dG/dt + M |grad mu|^2 - div q + rho r`.
///
/// Conduction enters only through `q`. The latent term is taken implicitly in
/// `theta'`, which keeps the update pointwise.
#[allow(clippy::too_many_arguments)]
pub fn step_temperature(
    state: &State,
    c_new: &ScalarField,
    v_new: &VectorField,
    q_new: &VectorField,
    sources: &ThermalSources,
    params: &MaterialParams,
    config: &SolverConfig,
    dt: f64,
) -> Result<ScalarField> {
    check_positive_theta(&state.theta)?;
    let grid = *state.grid();
    let div_q = divergence(q_new);
    let adv_theta = if v_new.is_zero() {
        vec![0.0; grid.cell_count()]
    } else {
        advect_with(state.theta.values(), Ghost::Mirror, v_new, config.advection_scheme)
    };
    let mut out = Vec::with_capacity(grid.cell_count());
    for idx in 0..grid.cell_count() {
        let theta = state.theta.values()[idx];
        let rho = law::density(c_new.values()[idx], params);
        let g_rate = sources.g_rate[idx];
        let capacity = rho * params.heat_capacity / dt - rho * g_rate;
        if !(capacity > 0.0) {
            return Err(step_failure("theta", "latent heat release exceeds heat capacity; reduce dt"));
        }
        let q2 = q_new.norm_sq_at(idx);
        let rest = -rho * params.heat_capacity * adv_theta[idx]
            + rho * (theta + q2 / params.kappa0) * g_rate
            + sources.viscous[idx]
            + sources.chemical[idx]
            - div_q.values()[idx]
            + rho * state.r.values()[idx];
        let next = if rest == 0.0 { theta } else { theta + rest / capacity };
        if !(next > 0.0 && next.is_finite()) {
            return Err(step_failure(
                "theta",
                format!("absolute temperature would become {next}"),
            ));
        }
        out.push(next);
    }
    ScalarField::from_values(grid, out)
}
