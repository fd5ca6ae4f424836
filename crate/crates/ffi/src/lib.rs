//! C interface to the quasisep simulator.
//!
//! Every function returns a [`QsStatus`]; on failure a message is available
//! from [`qs_last_error_message`] on the same thread. Simulations live behind
//! the opaque [`QsSim`] handle, created by `qs_sim_new_*` and released with
//! [`qs_sim_free`]. A handle may be moved between threads but must not be used
//! from two threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quasisep::cli::{build_scenario, parse_config, RunConfig, ScenarioKind};
use quasisep::constitutive::{self as law, MaterialParams};
use quasisep::diagnostics::{record_with, DiagnosticsOptions};
use quasisep::solver::{self, RunObserver, State, StepReport};
use quasisep::{DiagnosticsRecord, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    NullPointer = 1,
    /// A string argument is not UTF-8, or an enum or size is out of range.
    InvalidArgument = 2,
    /// Configuration text could not be parsed.
    Parse = 3,
    /// A configuration value violates its constraint.
    Validation = 4,
    /// A state field is invalid (e.g. nonpositive temperature).
    InvalidState = 5,
    /// A time step failed even after halving dt.
    StepFailure = 6,
    GridMismatch = 7,
    Io = 8,
    /// The caller's buffer is shorter than required.
    BufferTooSmall = 9,
    /// An internal panic was caught at the boundary.
    Internal = 10,
}

/// Fields that can be copied out of a simulation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsField {
    C = 0,
    Theta = 1,
    Vx = 2,
    Vy = 3,
    Qx = 4,
    Qy = 5,
    /// Constitutive pressure `p(c)`.
    Pressure = 6,
}

impl QsField {
    const ALL: [QsField; 7] = [
        QsField::C,
        QsField::Theta,
        QsField::Vx,
        QsField::Vy,
        QsField::Qx,
        QsField::Qy,
        QsField::Pressure,
    ];

    fn from_code(code: i32) -> Option<Self> {
        Self::ALL.into_iter().find(|f| *f as i32 == code)
    }
}

/// Material parameters, field for field the same as the configuration keys
/// `material.*`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QsMaterialParams {
    pub rho10: f64,
    pub rho20: f64,
    pub gamma: f64,
    pub theta0: f64,
    pub kappa0: f64,
    pub delta: f64,
    pub m0: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub heat_capacity: f64,
    pub p0: f64,
}

impl From<&MaterialParams> for QsMaterialParams {
    fn from(p: &MaterialParams) -> Self {
        QsMaterialParams {
            rho10: p.rho10,
            rho20: p.rho20,
            gamma: p.gamma,
            theta0: p.theta0,
            kappa0: p.kappa0,
            delta: p.delta,
            m0: p.m0,
            nu1: p.nu1,
            nu2: p.nu2,
            sigma1: p.sigma1,
            sigma2: p.sigma2,
            heat_capacity: p.heat_capacity,
            p0: p.p0,
        }
    }
}

impl From<&QsMaterialParams> for MaterialParams {
    fn from(p: &QsMaterialParams) -> Self {
        MaterialParams {
            rho10: p.rho10,
            rho20: p.rho20,
            gamma: p.gamma,
            theta0: p.theta0,
            kappa0: p.kappa0,
            delta: p.delta,
            m0: p.m0,
            nu1: p.nu1,
            nu2: p.nu2,
            sigma1: p.sigma1,
            sigma2: p.sigma2,
            heat_capacity: p.heat_capacity,
            p0: p.p0,
        }
    }
}

/// Diagnostics of the current state. `entropy_production` is only meaningful
/// when `has_entropy_production` is nonzero, i.e. after at least one step.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QsDiagnostics {
    pub t: f64,
    pub total_mass: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub kinetic_energy: f64,
    pub internal_energy: f64,
    pub free_energy: f64,
    pub lyapunov: f64,
    pub entropy_production: f64,
    pub has_entropy_production: u8,
    pub constraint_residual: f64,
    pub assumption_violation_fraction: f64,
}

/// Opaque simulation handle.
pub struct QsSim {
    config: RunConfig,
    state: State,
    previous: Option<State>,
    steps: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> QsStatus {
    match e {
        Error::InvalidState { .. } => QsStatus::InvalidState,
        Error::StepFailure { .. } => QsStatus::StepFailure,
        Error::GridMismatch(_) => QsStatus::GridMismatch,
        Error::InvalidGrid(_) | Error::Validation { .. } => QsStatus::Validation,
        Error::Parse { .. } => QsStatus::Parse,
        Error::Io { .. } => QsStatus::Io,
    }
}

/// Runs `f` behind the panic barrier and records errors.
fn guard(f: impl FnOnce() -> Result<(), (QsStatus, String)>) -> QsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QsStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (QsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (QsStatus, String) {
    (QsStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (QsStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QsStatus::InvalidArgument, format!("`{name}` is not valid UTF-8")))
}

unsafe fn sim_ref<'a>(sim: *const QsSim) -> Result<&'a QsSim, (QsStatus, String)> {
    sim.as_ref().ok_or_else(|| null("sim"))
}

unsafe fn sim_mut<'a>(sim: *mut QsSim) -> Result<&'a mut QsSim, (QsStatus, String)> {
    sim.as_mut().ok_or_else(|| null("sim"))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), (QsStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn make_sim(config: RunConfig) -> Result<Box<QsSim>, (QsStatus, String)> {
    let state = build_scenario(&config).map_err(lib_err)?;
    Ok(Box::new(QsSim {
        config,
        state,
        previous: None,
        steps: 0,
    }))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a simulation from configuration text (`key = value` lines).
///
/// # Safety
/// `config_text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_new_from_config(config_text: *const c_char, out: *mut *mut QsSim) -> QsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = parse_config(text(config_text, "config_text")?).map_err(lib_err)?;
        out.write(Box::into_raw(make_sim(config)?));
        Ok(())
    })
}

/// Creates a simulation from a scenario preset with its default settings.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_new_from_scenario(name: *const c_char, out: *mut *mut QsSim) -> QsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind: ScenarioKind = text(name, "name")?.parse().map_err(lib_err)?;
        out.write(Box::into_raw(make_sim(RunConfig::preset(kind))?));
        Ok(())
    })
}

/// Releases a simulation; null is ignored.
///
/// # Safety
/// `sim` must come from `qs_sim_new_*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_free(sim: *mut QsSim) {
    if !sim.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sim))));
    }
}

/// Advances by `n_steps` steps of the configured dt (each halved on failure
/// as needed). On failure the simulation keeps the last good state.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_step(sim: *mut QsSim, n_steps: u64) -> QsStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        for _ in 0..n_steps {
            let (next, _) = solver::step_sized(&sim.state, &sim.config.material, &sim.config.solver, sim.config.solver.dt, sim.steps + 1)
                .map_err(lib_err)?;
            sim.previous = Some(std::mem::replace(&mut sim.state, next));
            sim.steps += 1;
        }
        Ok(())
    })
}

/// Keeps the state preceding the latest record so diagnostics can report
/// entropy production after a full run.
struct TrailingState {
    previous: Option<State>,
    latest: Option<State>,
}

impl RunObserver for TrailingState {
    fn on_record(&mut self, _: u64, state: &State, _: &DiagnosticsRecord, _: Option<&StepReport>) -> quasisep::Result<()> {
        self.previous = self.latest.replace(state.clone());
        Ok(())
    }
}

/// Advances to the configured end time with the solver's run loop (the last
/// step is shortened to land on `t_end`).
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_run(sim: *mut QsSim) -> QsStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        let mut trail = TrailingState {
            previous: None,
            latest: None,
        };
        let outcome = solver::run(sim.state.clone(), &sim.config.material, &sim.config.solver, &mut trail).map_err(lib_err)?;
        if outcome.steps > 0 {
            sim.previous = trail.previous;
            sim.steps += outcome.steps;
            sim.state = outcome.state;
        }
        Ok(())
    })
}

/// Current simulated time.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_time(sim: *const QsSim, out: *mut f64) -> QsStatus {
    guard(|| write_out(out, sim_ref(sim)?.state.t, "out"))
}

/// Number of steps taken so far.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_step_count(sim: *const QsSim, out: *mut u64) -> QsStatus {
    guard(|| write_out(out, sim_ref(sim)?.steps, "out"))
}

/// Grid shape; `ny` is 1 for one-dimensional grids. Fields are stored with
/// x varying fastest.
///
/// # Safety
/// `sim` must be a live handle; `nx` and `ny` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_grid_shape(sim: *const QsSim, nx: *mut usize, ny: *mut usize) -> QsStatus {
    guard(|| {
        let g = *sim_ref(sim)?.state.grid();
        write_out(nx, g.nx(), "nx")?;
        write_out(ny, g.ny(), "ny")
    })
}

/// Number of cells, i.e. the buffer length `qs_sim_copy_field` needs.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_cell_count(sim: *const QsSim, out: *mut usize) -> QsStatus {
    guard(|| write_out(out, sim_ref(sim)?.state.grid().cell_count(), "out"))
}

/// Copies one field into `buf`, which must hold at least the cell count.
/// `field` is a [`QsField`] value; the y components of a one-dimensional grid
/// read as zero.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_copy_field(sim: *const QsSim, field: i32, buf: *mut f64, len: usize) -> QsStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let field = QsField::from_code(field)
            .ok_or_else(|| (QsStatus::InvalidArgument, format!("unknown field code {field}")))?;
        let s = &sim.state;
        let n = s.grid().cell_count();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < n {
            return Err((QsStatus::BufferTooSmall, format!("buffer holds {len} values, {n} needed")));
        }
        let out = std::slice::from_raw_parts_mut(buf, n);
        let component = |v: &quasisep::VectorField, k: usize, out: &mut [f64]| {
            if k < s.grid().dim() {
                out.copy_from_slice(v.component(k));
            } else {
                out.fill(0.0);
            }
        };
        match field {
            QsField::C => out.copy_from_slice(s.c.values()),
            QsField::Theta => out.copy_from_slice(s.theta.values()),
            QsField::Vx => component(&s.v, 0, out),
            QsField::Vy => component(&s.v, 1, out),
            QsField::Qx => component(&s.q, 0, out),
            QsField::Qy => component(&s.q, 1, out),
            QsField::Pressure => {
                for (o, &c) in out.iter_mut().zip(s.c.values()) {
                    *o = law::pressure(c, &sim.config.material);
                }
            }
        }
        Ok(())
    })
}

/// Diagnostics of the current state, with entropy production measured over
/// the latest step.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_diagnostics(sim: *const QsSim, out: *mut QsDiagnostics) -> QsStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let options = DiagnosticsOptions {
            advection_scheme: sim.config.solver.advection_scheme,
        };
        let r = record_with(&sim.state, &sim.config.material, sim.previous.as_ref(), &options).map_err(lib_err)?;
        write_out(
            out,
            QsDiagnostics {
                t: r.t,
                total_mass: r.total_mass,
                c_min: r.c_min,
                c_max: r.c_max,
                kinetic_energy: r.kinetic_energy,
                internal_energy: r.internal_energy,
                free_energy: r.free_energy,
                lyapunov: r.lyapunov,
                entropy_production: r.entropy_production.unwrap_or(0.0),
                has_entropy_production: r.entropy_production.is_some() as u8,
                constraint_residual: r.constraint_residual,
                assumption_violation_fraction: r.assumption_violation_fraction,
            },
            "out",
        )
    })
}

/// Material parameters the simulation was configured with.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_sim_material(sim: *const QsSim, out: *mut QsMaterialParams) -> QsStatus {
    guard(|| write_out(out, QsMaterialParams::from(&sim_ref(sim)?.config.material), "out"))
}

/// Default material parameters.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_material_default(out: *mut QsMaterialParams) -> QsStatus {
    guard(|| write_out(out, QsMaterialParams::from(&MaterialParams::default()), "out"))
}

unsafe fn checked_params(params: *const QsMaterialParams) -> Result<MaterialParams, (QsStatus, String)> {
    let p = MaterialParams::from(params.as_ref().ok_or_else(|| null("params"))?);
    p.validate().map_err(lib_err)?;
    Ok(p)
}

/// Mixture density `rho(c)`.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qs_density(c: f64, params: *const QsMaterialParams, out: *mut f64) -> QsStatus {
    guard(|| {
        let p = checked_params(params)?;
        write_out(out, law::density(c, &p), "out")
    })
}

/// Minimizers of the double well at generalized temperature `u`, in
/// ascending order: one value above the critical temperature, two below.
/// `out` must hold two values; `count` receives how many were written.
///
/// # Safety
/// `params` and `count` must be valid pointers and `out` valid for 2 writes.
#[no_mangle]
pub unsafe extern "C" fn qs_well_minima(
    u: f64,
    params: *const QsMaterialParams,
    out: *mut f64,
    count: *mut usize,
) -> QsStatus {
    guard(|| {
        let p = checked_params(params)?;
        if !(u.is_finite() && u >= 0.0) {
            return Err((QsStatus::InvalidArgument, format!("u must be finite and nonnegative, got {u}")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let minima = law::well_minima(u, &p);
        std::slice::from_raw_parts_mut(out, minima.len()).copy_from_slice(&minima);
        write_out(count, minima.len(), "count")
    })
}
