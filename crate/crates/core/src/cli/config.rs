//! Flat `key = value` run configuration.
//!
//! Grammar: one assignment per line, `#` starts a comment, blank lines are
//! ignored, keys are dotted (`material.gamma`). Values are layered: the
//! scenario preset first, then the file, then command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::constitutive::MaterialParams;
use crate::error::{Error, Result};
use crate::fields::Grid;
use crate::solver::{parse_advection_scheme, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Spinodal1d,
    Spinodal2d,
    HeatPulse,
    FluxInducedMixing,
}

impl ScenarioKind {
    pub const NAMES: [&'static str; 4] = ["spinodal_1d", "spinodal_2d", "heat_pulse", "flux_induced_mixing"];
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::Spinodal1d,
        ScenarioKind::Spinodal2d,
        ScenarioKind::HeatPulse,
        ScenarioKind::FluxInducedMixing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Spinodal1d => "spinodal_1d",
            ScenarioKind::Spinodal2d => "spinodal_2d",
            ScenarioKind::HeatPulse => "heat_pulse",
            ScenarioKind::FluxInducedMixing => "flux_induced_mixing",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::validation(
                    "scenario",
                    format!("unknown scenario `{s}`, expected one of {}", Self::NAMES.join(", ")),
                )
            })
    }
}

/// Grid extent; `ny = 1` selects a one-dimensional grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        if self.ny == 1 {
            Grid::new_1d(self.nx, self.hx)
        } else {
            Grid::new_2d(self.nx, self.ny, self.hx, self.hy)
        }
    }
}

/// Scenario name plus every preset parameter. Each preset reads the subset
/// it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub kind: ScenarioKind,
    /// Half-width of the uniform noise on `c`.
    pub amplitude: f64,
    /// Generalized temperature `u` the preset aims at.
    pub u_target: f64,
    /// Standard deviation of the Gaussian temperature bump.
    pub pulse_width: f64,
    /// Peak of the Gaussian temperature bump above `theta_bar`.
    pub pulse_height: f64,
    /// Background temperature.
    pub theta_bar: f64,
    /// Uniform concentration of the heat pulse.
    pub c_bar: f64,
    /// Width `w` of the `tanh` interface.
    pub interface_width: f64,
    /// Width of the band carrying the imposed heat flux.
    pub band_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub csv: bool,
    pub snapshots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub material: MaterialParams,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub scenario: ScenarioParams,
    pub output: OutputSpec,
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Splits config text into assignments without interpreting them.
pub fn parse_assignments(text: &str) -> Result<Vec<Assignment>> {
    let mut out: Vec<Assignment> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::Parse {
                line,
                msg: format!("malformed key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                msg: format!("missing value for `{key}`"),
            });
        }
        if let Some(prev) = out.iter().find(|a| a.key == key) {
            return Err(Error::Parse {
                line,
                msg: format!("`{key}` already set on line {}", prev.line),
            });
        }
        out.push(Assignment {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(out)
}

/// Parses and validates a configuration file's text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    RunConfig::layered(&parse_assignments(text)?, &[])
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::validation(key, format!("cannot parse `{value}` as a number")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::validation(key, format!("expected true or false, found `{value}`"))),
    }
}

impl RunConfig {
    /// Preset values for a scenario before any file or flag is applied.
    pub fn preset(kind: ScenarioKind) -> Self {
        let mut cfg = RunConfig {
            material: MaterialParams::default(),
            grid: GridSpec {
                nx: 256,
                ny: 1,
                hx: 1.0 / 256.0,
                hy: 1.0 / 256.0,
            },
            solver: SolverConfig::default(),
            scenario: ScenarioParams {
                kind,
                amplitude: 0.01,
                u_target: 2.0,
                pulse_width: 0.03,
                pulse_height: 0.1,
                theta_bar: 1.0,
                c_bar: 0.0,
                interface_width: 0.03,
                band_width: 0.2,
            },
            output: OutputSpec {
                dir: PathBuf::from("out"),
                csv: true,
                snapshots: true,
            },
        };
        for (key, value) in preset_values(kind) {
            cfg.set(key, value).expect("preset values are valid");
        }
        cfg
    }

    /// Preset of the selected scenario, then `file`, then `overrides`; the
    /// scenario itself is taken from the last layer that names one.
    pub fn layered(file: &[Assignment], overrides: &[(String, String)]) -> Result<Self> {
        let chosen = overrides
            .iter()
            .rev()
            .find(|(k, _)| k == "scenario")
            .map(|(_, v)| v.as_str())
            .or_else(|| file.iter().find(|a| a.key == "scenario").map(|a| a.value.as_str()))
            .unwrap_or("spinodal_1d");
        let kind: ScenarioKind = chosen.parse()?;
        let mut cfg = RunConfig::preset(kind);
        for a in file {
            cfg.set(&a.key, &a.value)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Assigns one key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let m = &mut self.material;
        let s = &mut self.solver;
        let sc = &mut self.scenario;
        match key {
            "material.rho10" => m.rho10 = number(key, value)?,
            "material.rho20" => m.rho20 = number(key, value)?,
            "material.gamma" => m.gamma = number(key, value)?,
            "material.theta0" => m.theta0 = number(key, value)?,
            "material.kappa0" => m.kappa0 = number(key, value)?,
            "material.delta" => m.delta = number(key, value)?,
            "material.M0" => m.m0 = number(key, value)?,
            "material.nu1" => m.nu1 = number(key, value)?,
            "material.nu2" => m.nu2 = number(key, value)?,
            "material.sigma1" => m.sigma1 = number(key, value)?,
            "material.sigma2" => m.sigma2 = number(key, value)?,
            "material.C" => m.heat_capacity = number(key, value)?,
            "material.p0" => m.p0 = number(key, value)?,
            "grid.nx" => self.grid.nx = number(key, value)?,
            "grid.ny" => self.grid.ny = number(key, value)?,
            "grid.hx" => self.grid.hx = number(key, value)?,
            "grid.hy" => self.grid.hy = number(key, value)?,
            "solver.dt" => s.dt = number(key, value)?,
            "solver.t_end" => s.t_end = number(key, value)?,
            "solver.mode" => s.coupling_mode = value.parse()?,
            "solver.advection" => s.advection_scheme = parse_advection_scheme(value)?,
            "solver.stabilization" => s.ch_stabilization = number(key, value)?,
            "solver.snapshot_every" => s.snapshot_every = number(key, value)?,
            "solver.seed" => s.rng_seed = number(key, value)?,
            "solver.isothermal" => s.isothermal = flag(key, value)?,
            "solver.tolerance" => s.solver_tolerance = number(key, value)?,
            // the preset was already chosen from the last layer naming a scenario
            "scenario" => {
                value.parse::<ScenarioKind>()?;
            }
            "scenario.amplitude" => sc.amplitude = number(key, value)?,
            "scenario.u_target" => sc.u_target = number(key, value)?,
            "scenario.pulse_width" => sc.pulse_width = number(key, value)?,
            "scenario.pulse_height" => sc.pulse_height = number(key, value)?,
            "scenario.theta_bar" => sc.theta_bar = number(key, value)?,
            "scenario.c_bar" => sc.c_bar = number(key, value)?,
            "scenario.interface_width" => sc.interface_width = number(key, value)?,
            "scenario.band_width" => sc.band_width = number(key, value)?,
            "output.dir" => self.output.dir = PathBuf::from(value),
            "output.csv" => self.output.csv = flag(key, value)?,
            "output.snapshots" => self.output.snapshots = flag(key, value)?,
            _ => return Err(Error::validation(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.grid.build()?;
        self.solver.validate()?;
        let sc = &self.scenario;
        let checks: [(&str, bool, &str); 8] = [
            ("scenario.amplitude", sc.amplitude.is_finite() && sc.amplitude >= 0.0, "amplitude must be >= 0"),
            ("scenario.u_target", sc.u_target.is_finite() && sc.u_target > 0.0, "u_target must be > 0"),
            ("scenario.pulse_width", sc.pulse_width.is_finite() && sc.pulse_width > 0.0, "pulse_width must be > 0"),
            ("scenario.pulse_height", sc.pulse_height.is_finite() && sc.pulse_height >= 0.0, "pulse_height must be >= 0"),
            ("scenario.theta_bar", sc.theta_bar.is_finite() && sc.theta_bar > 0.0, "theta_bar must be > 0"),
            ("scenario.c_bar", sc.c_bar.is_finite() && sc.c_bar.abs() <= 1.0, "c_bar must lie in [-1, 1]"),
            (
                "scenario.interface_width",
                sc.interface_width.is_finite() && sc.interface_width > 0.0,
                "interface_width must be > 0",
            ),
            ("scenario.band_width", sc.band_width.is_finite() && sc.band_width > 0.0, "band_width must be > 0"),
        ];
        for (key, ok, msg) in checks {
            if !ok {
                return Err(Error::validation(key, msg));
            }
        }
        if sc.kind == ScenarioKind::FluxInducedMixing && !(sc.u_target > sc.theta_bar) {
            return Err(Error::validation(
                "scenario.u_target",
                "u_target must exceed theta_bar for flux_induced_mixing",
            ));
        }
        Ok(())
    }
}

/// Per-scenario defaults, applied on top of the global defaults.
fn preset_values(kind: ScenarioKind) -> &'static [(&'static str, &'static str)] {
    match kind {
        ScenarioKind::Spinodal1d => &[
            ("grid.nx", "256"),
            ("grid.ny", "1"),
            ("grid.hx", "0.00390625"),
            ("solver.mode", "zero_velocity"),
            ("solver.dt", "0.01"),
            ("solver.t_end", "20"),
            ("scenario.u_target", "2"),
        ],
        ScenarioKind::Spinodal2d => &[
            ("grid.nx", "64"),
            ("grid.ny", "64"),
            ("grid.hx", "0.015625"),
            ("grid.hy", "0.015625"),
            ("solver.mode", "zero_velocity"),
            ("solver.dt", "0.01"),
            ("solver.t_end", "5"),
            ("scenario.u_target", "2"),
        ],
        ScenarioKind::HeatPulse => &[
            ("grid.nx", "400"),
            ("grid.ny", "1"),
            ("grid.hx", "0.0025"),
            ("material.delta", "5"),
            ("solver.mode", "zero_velocity"),
            ("solver.dt", "0.002"),
            ("solver.t_end", "3"),
            ("scenario.theta_bar", "1"),
            ("scenario.pulse_height", "0.1"),
            ("scenario.pulse_width", "0.03"),
            ("scenario.c_bar", "0"),
        ],
        ScenarioKind::FluxInducedMixing => &[
            ("grid.nx", "256"),
            ("grid.ny", "1"),
            ("grid.hx", "0.00390625"),
            ("material.nu1", "0.05"),
            ("material.nu2", "0.05"),
            ("solver.dt", "0.0002"),
            ("solver.t_end", "2"),
            ("scenario.theta_bar", "3.5"),
            ("scenario.u_target", "4.5"),
            ("scenario.interface_width", "0.05"),
            ("scenario.band_width", "0.25"),
        ],
    }
}
