//! Structured-grid simulation of non-isothermal phase separation in a
//! quasi-incompressible binary fluid.
//!
//! The unknowns are the mean velocity `v`, the order parameter `c`, the
//! absolute temperature `theta` and the heat flux `q`. Composition follows a
//! Cahn-Hilliard law whose double well depends on the generalized temperature
//! `u = theta + |q|^2 / kappa0`; heat obeys the Cattaneo-Maxwell relaxation
//! law, so thermal signals travel at finite speed.
//!
//! Modules:
//! - [`constitutive`]: pointwise material laws and thermodynamic potentials;
//! - [`fields`]: grids, fields and the finite-difference operators;
//! - [`solver`]: the operator-split time integrator;
//! - [`diagnostics`]: conservation, second-law and Lyapunov monitors;
//! - [`cli`]: configuration files, scenario presets and output writers.

pub mod cli;
pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod solver;

pub use constitutive::MaterialParams;
pub use diagnostics::{DiagnosticsRecord, ThresholdPolicy, Violation};
pub use error::{Error, Result};
pub use fields::{Grid, ScalarField, VectorField};
pub use solver::{CouplingMode, SolverConfig, State};
