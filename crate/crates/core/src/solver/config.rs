use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::AdvectionScheme;

/// How the velocity field is advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingMode {
    /// `v = 0` throughout; only the thermal Cahn-Hilliard subsystem evolves.
    ZeroVelocity,
    /// Momentum balance with the barotropic pressure `p(c)`; the volume
    /// constraint is only monitored.
    #[default]
    ConstitutivePressure,
    /// Momentum balance followed by a projection that enforces
    /// `div v = beta div(M grad mu)`; the projection potential replaces `p(c)`.
    ConstrainedDivergence,
}

impl CouplingMode {
    pub const NAMES: [&'static str; 3] = [
        "zero_velocity",
        "constitutive_pressure",
        "constrained_divergence",
    ];

    pub fn name(self) -> &'static str {
        match self {
            CouplingMode::ZeroVelocity => "zero_velocity",
            CouplingMode::ConstitutivePressure => "constitutive_pressure",
            CouplingMode::ConstrainedDivergence => "constrained_divergence",
        }
    }
}

impl fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CouplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_velocity" => Ok(CouplingMode::ZeroVelocity),
            "constitutive_pressure" => Ok(CouplingMode::ConstitutivePressure),
            "constrained_divergence" => Ok(CouplingMode::ConstrainedDivergence),
            other => Err(Error::validation(
                "solver.mode",
                format!("unknown mode `{other}`, expected one of {}", Self::NAMES.join(", ")),
            )),
        }
    }
}

pub fn parse_advection_scheme(s: &str) -> Result<AdvectionScheme> {
    match s {
        "upwind" => Ok(AdvectionScheme::Upwind),
        "centered" => Ok(AdvectionScheme::Centered),
        other => Err(Error::validation(
            "solver.advection",
            format!("unknown scheme `{other}`, expected upwind or centered"),
        )),
    }
}

pub fn advection_scheme_name(s: AdvectionScheme) -> &'static str {
    match s {
        AdvectionScheme::Upwind => "upwind",
        AdvectionScheme::Centered => "centered",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub coupling_mode: CouplingMode,
    pub advection_scheme: AdvectionScheme,
    /// Stabilization constant `A` of the implicit biharmonic shift.
    pub ch_stabilization: f64,
    /// Steps between snapshots; 0 disables snapshots.
    pub snapshot_every: u64,
    pub rng_seed: u64,
    /// Hold `theta` and `q` fixed (heat-bath limit).
    pub isothermal: bool,
    /// Relative tolerance of the iterative solves.
    pub solver_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-2,
            t_end: 1.0,
            coupling_mode: CouplingMode::default(),
            advection_scheme: AdvectionScheme::Upwind,
            ch_stabilization: 2.0,
            snapshot_every: 0,
            rng_seed: 1,
            isothermal: false,
            solver_tolerance: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::validation("solver.dt", "dt must be > 0"));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::validation("solver.t_end", "t_end must be >= 0"));
        }
        if !(self.ch_stabilization.is_finite() && self.ch_stabilization >= 0.0) {
            return Err(Error::validation("solver.stabilization", "stabilization must be >= 0"));
        }
        if !(self.solver_tolerance > 0.0 && self.solver_tolerance <= 1e-10) {
            return Err(Error::validation("solver.tolerance", "tolerance must be in (0, 1e-10]"));
        }
        Ok(())
    }
}

/// Per-step numbers reported alongside the new state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    /// Number of times dt was halved before the step succeeded.
    pub halvings: u32,
    pub max_dc: f64,
    /// `dt max|v| / h`.
    pub cfl_advection: f64,
    /// `dt max(kappa / (rho C)) / h^2`.
    pub cfl_conduction: f64,
    /// `dt max(M) gamma max(1/rho) / h^4`.
    pub cfl_cahn_hilliard: f64,
}
