//! Initial states of the scenario registry.

use crate::error::{Error, Result};
use crate::fields::{Grid, ScalarField, VectorField};
use crate::solver::State;

use super::config::{RunConfig, ScenarioKind};
use super::rng::SplitMix64;

/// Builds the initial state of `config.scenario`.
///
/// - `spinodal_1d`, `spinodal_2d`: `c` is uniform noise in `[-a, a)` drawn
///   cell by cell from the seeded generator, `theta = u_target`, `q = 0`;
/// - `heat_pulse`: `c = c_bar`, `theta = theta_bar + height exp(-r^2 / 2 w^2)`
///   centered in the domain, `q = 0`;
/// - `flux_induced_mixing`: `c = tanh((x - L/2) / w)`, `theta = theta_bar`,
///   and `q_x = sqrt(kappa0 (u_target - theta_bar))` on the band
///   `|x - L/2| < band_width / 2`, zero elsewhere.
///
/// All presets start at rest without sources.
pub fn build_scenario(config: &RunConfig) -> Result<State> {
    config.validate()?;
    let grid = config.grid.build()?;
    let sc = &config.scenario;
    let mut state = match sc.kind {
        ScenarioKind::Spinodal1d | ScenarioKind::Spinodal2d => {
            let mut rng = SplitMix64::new(config.solver.rng_seed);
            let mut s = State::uniform(grid, 0.0, sc.u_target);
            if sc.amplitude > 0.0 {
                for c in s.c.values_mut() {
                    *c = rng.symmetric(sc.amplitude);
                }
            }
            s
        }
        ScenarioKind::HeatPulse => {
            let mut s = State::uniform(grid, sc.c_bar, sc.theta_bar);
            let (cx, cy) = center(&grid);
            let two_w2 = 2.0 * sc.pulse_width * sc.pulse_width;
            s.theta = ScalarField::from_fn(grid, |x, y| {
                let r2 = (x - cx).powi(2) + if grid.dim() == 2 { (y - cy).powi(2) } else { 0.0 };
                sc.theta_bar + sc.pulse_height * (-r2 / two_w2).exp()
            });
            s
        }
        ScenarioKind::FluxInducedMixing => {
            let mut s = State::uniform(grid, 0.0, sc.theta_bar);
            let (cx, _) = center(&grid);
            s.c = ScalarField::from_fn(grid, |x, _| ((x - cx) / sc.interface_width).tanh());
            let magnitude = (config.material.kappa0 * (sc.u_target - sc.theta_bar)).sqrt();
            let mut q = VectorField::zeros(grid);
            for (idx, qx) in q.component_mut(0).iter_mut().enumerate() {
                let (x, _) = grid.center_of(idx);
                if in_band(x, cx, sc.band_width) {
                    *qx = magnitude;
                }
            }
            s.q = q;
            s
        }
    };
    state.t = 0.0;
    state.validate().map_err(|e| match e {
        Error::InvalidState { field, reason } => Error::validation(
            "scenario",
            format!("preset produced an invalid `{field}`: {reason}"),
        ),
        other => other,
    })?;
    Ok(state)
}

/// Whether `x` lies inside the band of width `width` centered at `cx`.
pub fn in_band(x: f64, cx: f64, width: f64) -> bool {
    (x - cx).abs() < 0.5 * width
}

fn center(grid: &Grid) -> (f64, f64) {
    let cy = if grid.dim() == 2 { 0.5 * grid.length(1) } else { 0.0 };
    (0.5 * grid.length(0), cy)
}
