//! C interface to the lpflow solver and its Littlewood-Paley norms.
//!
//! Conventions:
//!
//! - Every function returns an [`LpflowStatus`]; results come back through
//!   out-pointers, which are written only on success.
//! - On failure a message for the calling thread is available from
//!   [`lpflow_last_error`] until the next failing call on that thread.
//! - Handles are opaque. The caller owns each handle it receives and releases
//!   it with the matching `_free` function; `_free` accepts null.
//! - Fields cross the boundary as `n * n` doubles in row-major order, the
//!   sample at `(x_i, y_j)` at index `j * n + i`.
//! - Panics never unwind into C; they surface as [`LpflowStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

use lpflow::checkpoint::{load_checkpoint, save_checkpoint};
use lpflow::config::parse_config;
use lpflow::lp::{besov_b0_inf_inf, bmo_norm, holder_norm, BlockNormed, DyadicPartition};
use lpflow::monitor::CriterionSample;
use lpflow::runner::{Simulation, State};
use lpflow::{Error, Grid, ScalarField};

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpflowStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or inconsistent with the grid.
    InvalidArgument = 2,
    /// The configuration text was rejected.
    Config = 3,
    /// The time step exceeds the CFL limit of the current state.
    Cfl = 4,
    /// The state stopped being finite; the last finite state is kept.
    Blowup = 5,
    /// A file could not be read or written.
    Io = 6,
    /// A checkpoint file is corrupt or from another version.
    Checkpoint = 7,
    /// An internal error; the handle involved should be freed.
    Panic = 8,
}

/// A grid with its dyadic partition.
pub struct LpflowGrid {
    grid: Arc<Grid>,
    part: DyadicPartition,
}

/// A running simulation and the samples it has recorded.
pub struct LpflowSimulation {
    sim: Simulation,
    samples: Vec<CriterionSample>,
}

/// Criterion quantities of one state. Stress entries are zero for MHD runs,
/// `h_bmo` is zero for Oldroyd-B runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpflowSample {
    pub t: f64,
    pub tau_sup: f64,
    pub tau_l2: f64,
    pub tau_l1: f64,
    pub tau_bmo: f64,
    pub tau_besov: f64,
    pub v_holder: f64,
    pub tau_holder: f64,
    pub grad_v_sup: f64,
    pub v_l2: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub conf_min_eig: f64,
    pub conf_min_det: f64,
    pub h_bmo: f64,
}

impl From<&CriterionSample> for LpflowSample {
    fn from(s: &CriterionSample) -> Self {
        LpflowSample {
            t: s.t,
            tau_sup: s.tau_sup,
            tau_l2: s.tau_l2,
            tau_l1: s.tau_l1,
            tau_bmo: s.tau_bmo,
            tau_besov: s.tau_besov,
            v_holder: s.v_holder,
            tau_holder: s.tau_holder,
            grad_v_sup: s.grad_v_sup,
            v_l2: s.v_l2,
            energy: s.energy,
            dissipation: s.dissipation,
            conf_min_eig: s.conf_min_eig,
            conf_min_det: s.conf_min_det,
            h_bmo: s.h_bmo,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: LpflowStatus,
    message: String,
}

impl Failure {
    fn new(status: LpflowStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) => LpflowStatus::Config,
            Error::Cfl { .. } => LpflowStatus::Cfl,
            Error::Blowup { .. } => LpflowStatus::Blowup,
            Error::Io { .. } | Error::Samples(_) => LpflowStatus::Io,
            Error::Checkpoint(_) => LpflowStatus::Checkpoint,
            _ => LpflowStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn set_last_error(message: String) {
    // interior NULs cannot cross into C
    let message = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

/// Runs `body`, recording any failure or panic for [`lpflow_last_error`].
fn guard(body: impl FnOnce() -> Outcome) -> LpflowStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LpflowStatus::Ok,
        Ok(Err(f)) => {
            set_last_error(f.message);
            f.status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {message}"));
            LpflowStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure::new(LpflowStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `p` is null or valid for reads of a `T`.
unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

/// # Safety
/// `p` is null or valid for writes of a `T`.
unsafe fn borrow_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

/// # Safety
/// `p` is null or valid for writes of a `T`.
unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Outcome {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `s` is null or a NUL-terminated string.
unsafe fn string<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::new(LpflowStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// # Safety
/// `values` is null or valid for reads of `len` doubles.
unsafe fn samples<'a>(values: *const f64, len: usize, grid: &Grid) -> Result<&'a [f64], Failure> {
    if values.is_null() {
        return Err(null("values"));
    }
    if len != grid.len() {
        return Err(Error::Length {
            expected: grid.len(),
            got: len,
        }
        .into());
    }
    Ok(std::slice::from_raw_parts(values, len))
}

/// # Safety
/// `out` is null or valid for writes of `len` doubles.
unsafe fn output<'a>(out: *mut f64, len: usize, expected: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    if len != expected {
        return Err(Failure::new(
            LpflowStatus::InvalidArgument,
            format!("{name} holds {len} doubles, {expected} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(out, len))
}

/// Non-finite samples are rejected: every norm of them would be NaN.
fn scalar(g: &LpflowGrid, values: &[f64]) -> Result<ScalarField, Failure> {
    if !values.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite.into());
    }
    Ok(ScalarField::from_values(&g.grid, values.to_vec())?)
}

/// Message of the calling thread's last failure, or null if none. The
/// string stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn lpflow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lpflow_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an `n x n` grid on the square of side `length`. `n` must be a
/// power of two, at least 16.
///
/// # Safety
/// `out` is null or valid for writes of a pointer.
#[no_mangle]
pub unsafe extern "C" fn lpflow_grid_new(n: usize, length: f64, out: *mut *mut LpflowGrid) -> LpflowStatus {
    guard(|| {
        let grid = Grid::new(n, length)?;
        let part = DyadicPartition::new(&grid)?;
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(Box::into_raw(Box::new(LpflowGrid { grid, part })));
        Ok(())
    })
}

/// # Safety
/// `grid` is null or a live handle from [`lpflow_grid_new`].
#[no_mangle]
pub unsafe extern "C" fn lpflow_grid_free(grid: *mut LpflowGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Points per side, and the first and last dyadic block index.
///
/// # Safety
/// `grid` is a live handle; each out-pointer is writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_grid_info(
    grid: *const LpflowGrid,
    n: *mut usize,
    q_min: *mut i32,
    q_max: *mut i32,
) -> LpflowStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        write(n, "n", g.grid.n())?;
        write(q_min, "q_min", g.part.q_min())?;
        write(q_max, "q_max", g.part.q_max())
    })
}

/// `‖Δ_q f‖_∞` for `q = q_min..=q_max` into `out`, which holds exactly
/// `q_max - q_min + 1` doubles.
///
/// # Safety
/// `grid` is a live handle; `values` is readable for `len` doubles and
/// `out` writable for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lpflow_block_sup_norms(
    grid: *const LpflowGrid,
    values: *const f64,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> LpflowStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let f = scalar(g, samples(values, len, &g.grid)?)?;
        let out = output(out, out_len, g.part.block_count(), "out")?;
        out.copy_from_slice(&f.block_sup_norms(&g.part));
        Ok(())
    })
}

/// Hölder seminorm `sup_q 2^{qα} ‖Δ_q f‖_∞` for `α` in `(0, 1) ∪ (1, 2)`.
///
/// # Safety
/// `grid` is a live handle; `values` is readable for `len` doubles and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_holder_norm(
    grid: *const LpflowGrid,
    values: *const f64,
    len: usize,
    alpha: f64,
    out: *mut f64,
) -> LpflowStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let f = scalar(g, samples(values, len, &g.grid)?)?;
        write(out, "out", holder_norm(&f, alpha, &g.part)?)
    })
}

/// `sup_q ‖Δ_q f‖_∞`.
///
/// # Safety
/// `grid` is a live handle; `values` is readable for `len` doubles and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_besov_norm(
    grid: *const LpflowGrid,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> LpflowStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let f = scalar(g, samples(values, len, &g.grid)?)?;
        write(out, "out", besov_b0_inf_inf(&f, &g.part))
    })
}

/// Dyadic BMO seminorm of the field's trigonometric interpolant.
///
/// # Safety
/// `grid` is a live handle; `values` is readable for `len` doubles and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_bmo_norm(
    grid: *const LpflowGrid,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> LpflowStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let f = scalar(g, samples(values, len, &g.grid)?)?;
        write(out, "out", bmo_norm(&f))
    })
}


/// Creates a simulation from TOML configuration text, at its initial data.
///
/// # Safety
/// `config` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_new(
    config: *const c_char,
    out: *mut *mut LpflowSimulation,
) -> LpflowStatus {
    guard(|| {
        let config = parse_config(string(config, "config")?)?;
        let sim = Simulation::new(&config)?;
        write(out, "out", Box::into_raw(Box::new(LpflowSimulation { sim, samples: Vec::new() })))
    })
}

/// Reopens a checkpoint written by [`lpflow_simulation_save`] or by a batch
/// run, with its recorded samples.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_load(
    path: *const c_char,
    out: *mut *mut LpflowSimulation,
) -> LpflowStatus {
    guard(|| {
        let ckpt = load_checkpoint(&PathBuf::from(string(path, "path")?))?;
        let sim = Simulation::from_state(ckpt.config, ckpt.state)?;
        let samples = ckpt.samples;
        write(out, "out", Box::into_raw(Box::new(LpflowSimulation { sim, samples })))
    })
}

/// # Safety
/// `sim` is null or a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_free(sim: *mut LpflowSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances `steps` steps. On failure the state is the last one reached.
///
/// # Safety
/// `sim` is a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_step(sim: *mut LpflowSimulation, steps: u64) -> LpflowStatus {
    guard(|| {
        let s = borrow_mut(sim, "sim")?;
        for _ in 0..steps {
            s.sim.step()?;
        }
        Ok(())
    })
}

/// Current time and step count.
///
/// # Safety
/// `sim` is a live simulation handle; `t` and `step` are writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_time(
    sim: *const LpflowSimulation,
    t: *mut f64,
    step: *mut u64,
) -> LpflowStatus {
    guard(|| {
        let s = borrow(sim, "sim")?;
        write(t, "t", s.sim.state().t())?;
        write(step, "step", s.sim.state().step())
    })
}

/// Samples the criterion quantities of the current state and appends them
/// to the history saved with checkpoints.
///
/// # Safety
/// `sim` is a live simulation handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_sample(
    sim: *mut LpflowSimulation,
    out: *mut LpflowSample,
) -> LpflowStatus {
    guard(|| {
        let s = borrow_mut(sim, "sim")?;
        let sample = s.sim.sample()?;
        write(out, "out", LpflowSample::from(&sample))?;
        s.samples.push(sample);
        Ok(())
    })
}

/// Copies the velocity components into `vx` and `vy`, each `len = n * n`
/// doubles.
///
/// # Safety
/// `sim` is a live simulation handle; `vx` and `vy` are writable for `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_velocity(
    sim: *const LpflowSimulation,
    vx: *mut f64,
    vy: *mut f64,
    len: usize,
) -> LpflowStatus {
    guard(|| {
        let s = borrow(sim, "sim")?;
        let state = s.sim.state();
        let v = match state {
            State::Oldroyd(o) => &o.v,
            State::Mhd(m) => &m.v,
        };
        let size = state.grid().len();
        output(vx, len, size, "vx")?.copy_from_slice(&v.x.values());
        output(vy, len, size, "vy")?.copy_from_slice(&v.y.values());
        Ok(())
    })
}

/// Writes a checkpoint of the current state and recorded samples to `path`.
///
/// # Safety
/// `sim` is a live simulation handle; `path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lpflow_simulation_save(
    sim: *const LpflowSimulation,
    path: *const c_char,
) -> LpflowStatus {
    guard(|| {
        let s = borrow(sim, "sim")?;
        let path = PathBuf::from(string(path, "path")?);
        Ok(save_checkpoint(&path, &s.sim.checkpoint(s.samples.clone()))?)
    })
}
