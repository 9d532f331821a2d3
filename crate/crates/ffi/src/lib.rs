//! C ABI over `quantum-battery`.
//!
//! Every fallible call returns a [`QbStatus`]; on failure the message is
//! kept per thread and read with [`qb_last_error_message`]. Objects cross the
//! boundary as opaque handles that the caller releases with the matching
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quantum_battery::capacity::capacity_report;
use quantum_battery::dynamics::{integrate, Trajectory};
use quantum_battery::linalg::{partial_trace, Subsystem};
use quantum_battery::model::{battery_hamiltonian, HamiltonianParams};
use quantum_battery::relations::{verify_all, GridSpec, RelationVerdict};
use quantum_battery::resources::ResourceReport;
use quantum_battery::{capacity, cli, noise, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    InvalidConfig = 3,
    GammaOutOfRange = 4,
    OutOfBounds = 5,
    Numerical = 6,
    Panic = 7,
}

impl From<&Error> for QbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParams(_) => QbStatus::InvalidParams,
            Error::InvalidConfig(_) | Error::UnknownRelation(_) | Error::Io(_) => {
                QbStatus::InvalidConfig
            }
            Error::GammaOutOfRange(_) | Error::GammaAtHalf => QbStatus::GammaOutOfRange,
            _ => QbStatus::Numerical,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn fail(status: QbStatus, msg: impl Into<String>) -> QbStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), QbStatus>) -> QbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QbStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(QbStatus::Panic, "panic inside quantum-battery"),
    }
}

fn lift<T>(r: quantum_battery::Result<T>) -> Result<T, QbStatus> {
    r.map_err(|e| fail(QbStatus::from(&e), e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, QbStatus> {
    // SAFETY: caller passes either NULL or a live pointer from this library.
    unsafe { p.as_ref() }.ok_or_else(|| fail(QbStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), QbStatus> {
    if out.is_null() {
        return Err(fail(QbStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: non-null and, per the API contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

/// Static description of a status code. Never NULL.
#[no_mangle]
pub extern "C" fn qb_status_message(status: QbStatus) -> *const c_char {
    let s: &'static CStr = match status {
        QbStatus::Ok => c"ok",
        QbStatus::NullPointer => c"null pointer argument",
        QbStatus::InvalidParams => c"invalid model parameters",
        QbStatus::InvalidConfig => c"invalid configuration",
        QbStatus::GammaOutOfRange => c"noise strength out of range",
        QbStatus::OutOfBounds => c"index out of bounds",
        QbStatus::Numerical => c"numerical failure",
        QbStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message of the last failure on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Opaque model parameters.
pub struct QbParams(HamiltonianParams);

/// Validates and boxes the four model constants.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_params_new(
    omega_b: f64,
    omega_c: f64,
    j1: f64,
    j2: f64,
    out: *mut *mut QbParams,
) -> QbStatus {
    guard(|| {
        let p = lift(HamiltonianParams::new(omega_b, omega_c, j1, j2))?;
        unsafe { write_out(out, Box::into_raw(Box::new(QbParams(p))), "out") }
    })
}

/// # Safety
/// `params` must be NULL or a handle from [`qb_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_params_free(params: *mut QbParams) {
    if !params.is_null() {
        // SAFETY: handle was created by Box::into_raw in qb_params_new.
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Battery, charger and total capacities and the residual.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QbCapacityReport {
    pub battery: f64,
    pub charger: f64,
    pub total: f64,
    pub residual: f64,
}

/// The six resource measures.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QbResourceReport {
    pub concurrence: f64,
    pub steering: f64,
    pub bell: f64,
    pub coherence_l1: f64,
    pub imaginarity_l1: f64,
    pub texture_tr: f64,
}

impl From<ResourceReport> for QbResourceReport {
    fn from(r: ResourceReport) -> Self {
        Self {
            concurrence: r.concurrence,
            steering: r.steering,
            bell: r.bell,
            coherence_l1: r.coherence_l1,
            imaginarity_l1: r.imaginarity_l1,
            texture_tr: r.texture_tr,
        }
    }
}

/// Closed-form capacities at time `t`.
///
/// # Safety
/// `params` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qb_capacity_report(
    params: *const QbParams,
    t: f64,
    out: *mut QbCapacityReport,
) -> QbStatus {
    guard(|| {
        let p = unsafe { deref(params, "params") }?;
        let r = lift(capacity_report(&p.0, t))?;
        let report = QbCapacityReport {
            battery: r.battery,
            charger: r.charger,
            total: r.total,
            residual: r.residual,
        };
        unsafe { write_out(out, report, "out") }
    })
}

/// Resource measures of the evolved state, dephased when `gamma >= 0`.
///
/// Pass a negative `gamma` for the noiseless state.
///
/// # Safety
/// `params` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qb_resources(
    params: *const QbParams,
    t: f64,
    gamma: f64,
    out: *mut QbResourceReport,
) -> QbStatus {
    guard(|| {
        let p = unsafe { deref(params, "params") }?;
        let r = if gamma < 0.0 {
            lift(cli::resources_at(&p.0, t, None))?
        } else {
            lift(noise::noisy_resources(&p.0, t, gamma))?
        };
        unsafe { write_out(out, r.into(), "out") }
    })
}

/// Opaque integrated trajectory.
pub struct QbTrajectory {
    params: HamiltonianParams,
    inner: Trajectory,
}

/// Integrates from `|01⟩` and stores `steps` samples on `[0, t_max]`.
///
/// # Safety
/// `params` must be a live handle; `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_trajectory_integrate(
    params: *const QbParams,
    t_max: f64,
    steps: usize,
    out: *mut *mut QbTrajectory,
) -> QbStatus {
    guard(|| {
        let p = unsafe { deref(params, "params") }?;
        let inner = lift(integrate(&p.0, t_max, steps))?;
        let handle = Box::new(QbTrajectory { params: p.0, inner });
        unsafe { write_out(out, Box::into_raw(handle), "out") }
    })
}

/// Number of samples, 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_trajectory_len(traj: *const QbTrajectory) -> usize {
    unsafe { traj.as_ref() }.map_or(0, |t| t.inner.len())
}

/// Time and spectral battery capacity of sample `index`.
///
/// # Safety
/// `traj` must be a live handle; `t_out` and `capacity_out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qb_trajectory_sample(
    traj: *const QbTrajectory,
    index: usize,
    t_out: *mut f64,
    capacity_out: *mut f64,
) -> QbStatus {
    guard(|| {
        let traj = unsafe { deref(traj, "traj") }?;
        let Some(state) = traj.inner.states.get(index) else {
            return Err(fail(
                QbStatus::OutOfBounds,
                format!("index {index} >= {}", traj.inner.len()),
            ));
        };
        let battery = lift(partial_trace(state, Subsystem::Battery))?;
        let cap = lift(capacity::capacity_spectral(
            &battery,
            &battery_hamiltonian(&traj.params),
        ))?;
        unsafe {
            write_out(t_out, traj.inner.times[index], "t_out")?;
            write_out(capacity_out, cap, "capacity_out")
        }
    })
}

/// # Safety
/// `traj` must be NULL or a handle from [`qb_trajectory_integrate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_trajectory_free(traj: *mut QbTrajectory) {
    if !traj.is_null() {
        // SAFETY: created by Box::into_raw in qb_trajectory_integrate.
        drop(unsafe { Box::from_raw(traj) });
    }
}

/// One relation verdict; `name` is owned by the verification handle.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbVerdict {
    pub name: *const c_char,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Opaque result of the relation suite.
pub struct QbVerification {
    verdicts: Vec<RelationVerdict>,
    names: Vec<CString>,
}

/// Runs every relation on the default grid with the given seed.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_verify_all(seed: u64, out: *mut *mut QbVerification) -> QbStatus {
    guard(|| {
        let verdicts = lift(verify_all(&GridSpec::default_with_seed(seed)))?;
        let names = verdicts
            .iter()
            .map(|v| CString::new(v.relation.name()).expect("names are ASCII"))
            .collect();
        let handle = Box::new(QbVerification { verdicts, names });
        unsafe { write_out(out, Box::into_raw(handle), "out") }
    })
}

/// Number of verdicts, 0 for NULL.
///
/// # Safety
/// `v` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_verification_len(v: *const QbVerification) -> usize {
    unsafe { v.as_ref() }.map_or(0, |v| v.verdicts.len())
}

/// Verdict `index`.
///
/// # Safety
/// `v` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qb_verification_get(
    v: *const QbVerification,
    index: usize,
    out: *mut QbVerdict,
) -> QbStatus {
    guard(|| {
        let v = unsafe { deref(v, "verification") }?;
        let Some(verdict) = v.verdicts.get(index) else {
            return Err(fail(
                QbStatus::OutOfBounds,
                format!("index {index} >= {}", v.verdicts.len()),
            ));
        };
        let record = QbVerdict {
            name: v.names[index].as_ptr(),
            samples: verdict.samples,
            max_residual: verdict.max_residual,
            tolerance: verdict.tolerance,
            pass: verdict.pass,
        };
        unsafe { write_out(out, record, "out") }
    })
}

/// Whether every verdict passed; false for NULL.
///
/// # Safety
/// `v` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_verification_all_pass(v: *const QbVerification) -> bool {
    unsafe { v.as_ref() }.is_some_and(|v| v.verdicts.iter().all(|x| x.pass))
}

/// # Safety
/// `v` must be NULL or a handle from [`qb_verify_all`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_verification_free(v: *mut QbVerification) {
    if !v.is_null() {
        // SAFETY: created by Box::into_raw in qb_verify_all.
        drop(unsafe { Box::from_raw(v) });
    }
}
