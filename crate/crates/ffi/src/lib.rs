//! C ABI over `invasion-core`.
//!
//! Every fallible call returns an [`InvStatus`]; on failure the message is
//! kept per thread and read with [`inv_last_error_message`]. Objects cross the
//! boundary as opaque handles and are released with their `_free` function.
//! Panics are caught at the boundary and reported as `INV_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use invasion_core::analysis::{w_star, VerdictKind};
use invasion_core::cli::preset;
use invasion_core::reaction::{Nonlinearity, Reaction};
use invasion_core::scenarios::{Scenario, ScenarioError, ScenarioOutcome, VERSION};
use invasion_core::stationary::{front_profile_1d, FrontOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    Geometry = 5,
    Reaction = 6,
    Solver = 7,
    Stationary = 8,
    Analysis = 9,
    Io = 10,
    NotFound = 11,
    BufferTooSmall = 12,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvVerdictKind {
    Blocking = 0,
    Persistence = 1,
    Invasion = 2,
    OrientedInvasion = 3,
    Inconclusive = 4,
}

impl From<VerdictKind> for InvVerdictKind {
    fn from(k: VerdictKind) -> Self {
        match k {
            VerdictKind::Blocking => Self::Blocking,
            VerdictKind::Persistence => Self::Persistence,
            VerdictKind::Invasion => Self::Invasion,
            VerdictKind::OrientedInvasion => Self::OrientedInvasion,
            VerdictKind::Inconclusive => Self::Inconclusive,
        }
    }
}

/// A loaded scenario.
pub struct InvScenario {
    inner: Scenario,
}

/// The result of running a scenario.
pub struct InvOutcome {
    inner: ScenarioOutcome,
}

/// A reaction term `f(x, s)`.
pub struct InvReaction {
    inner: Reaction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(InvStatus, String);

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let status = match e {
            ScenarioError::Config(_) => InvStatus::Config,
            ScenarioError::Geometry(_) => InvStatus::Geometry,
            ScenarioError::Reaction(_) => InvStatus::Reaction,
            ScenarioError::Solver(_) => InvStatus::Solver,
            ScenarioError::Stationary(_) => InvStatus::Stationary,
            ScenarioError::Analysis(_) => InvStatus::Analysis,
            ScenarioError::Io(_) => InvStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> InvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            InvStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            InvStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(InvStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(InvStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(InvStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `h` is null or a live handle of type `T`.
unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| Failure(InvStatus::NullPointer, format!("{what} is null")))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn inv_version() -> *const c_char {
    static V: &str = concat!("invasion ", env!("CARGO_PKG_VERSION"), "\0");
    debug_assert!(VERSION.len() + 1 == V.len());
    V.as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn inv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Parses a scenario from TOML text.
///
/// # Safety
/// `toml` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_from_toml(toml: *const c_char, out: *mut *mut InvScenario) -> InvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s = Scenario::from_toml_str(text(toml, "toml")?)?;
        s.validate()?;
        *out = Box::into_raw(Box::new(InvScenario { inner: s }));
        Ok(())
    })
}

/// Loads a scenario file (TOML, or JSON for `.json`).
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_load(path: *const c_char, out: *mut *mut InvScenario) -> InvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s = Scenario::load(Path::new(text(path, "path")?))?;
        *out = Box::into_raw(Box::new(InvScenario { inner: s }));
        Ok(())
    })
}

/// One of the built-in scenarios (`omega1`, `blocking`, `cylinder`, ...).
///
/// # Safety
/// `name` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_preset(name: *const c_char, out: *mut *mut InvScenario) -> InvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let name = text(name, "name")?;
        let s = preset(name).map_err(|e| match e {
            ScenarioError::Config(m) => Failure(InvStatus::NotFound, m),
            e => e.into(),
        })?;
        *out = Box::into_raw(Box::new(InvScenario { inner: s }));
        Ok(())
    })
}

/// Multiplies the grid resolution.
///
/// # Safety
/// `s` is a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_set_resolution_multiplier(s: *mut InvScenario, mult: u32) -> InvStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| Failure(InvStatus::NullPointer, "scenario is null".into()))?;
        if mult == 0 {
            return Err(Failure(InvStatus::InvalidArgument, "multiplier must be positive".into()));
        }
        s.inner = s.inner.clone().with_resolution_multiplier(mult);
        Ok(())
    })
}

/// Writes the scenario's canonical TOML into `buf` (NUL-terminated). `needed`
/// receives the required size including the NUL; a too-small buffer gives
/// `INV_STATUS_BUFFER_TOO_SMALL` and leaves `buf` untouched.
///
/// # Safety
/// `s` is a live handle; `buf` has `len` writable bytes or is null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_to_toml(s: *const InvScenario, buf: *mut c_char, len: usize, needed: *mut usize) -> InvStatus {
    guard(|| {
        let s = handle(s, "scenario")?;
        write_string(&s.inner.to_toml(), buf, len, needed)
    })
}

/// Config hash (git blob sha1 of the canonical TOML), 40 hex digits.
///
/// # Safety
/// As [`inv_scenario_to_toml`].
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_config_hash(s: *const InvScenario, buf: *mut c_char, len: usize, needed: *mut usize) -> InvStatus {
    guard(|| {
        let s = handle(s, "scenario")?;
        write_string(&s.inner.config_hash(), buf, len, needed)
    })
}

unsafe fn write_string(v: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), Failure> {
    let n = v.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || len < n {
        return Err(Failure(InvStatus::BufferTooSmall, format!("need {n} bytes, got {len}")));
    }
    std::ptr::copy_nonoverlapping(v.as_ptr(), buf.cast::<u8>(), v.len());
    *buf.add(v.len()) = 0;
    Ok(())
}

/// # Safety
/// `s` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_free(s: *mut InvScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs the scenario to its horizon.
///
/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn inv_scenario_run(s: *const InvScenario, out: *mut *mut InvOutcome) -> InvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s = handle(s, "scenario")?;
        let o = s.inner.run()?;
        *out = Box::into_raw(Box::new(InvOutcome { inner: o }));
        Ok(())
    })
}

/// Writes the run directory (verdict, probes, config, snapshots, manifest).
///
/// # Safety
/// Live handles; `dir` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn inv_outcome_write_run_dir(s: *const InvScenario, o: *const InvOutcome, dir: *const c_char) -> InvStatus {
    guard(|| {
        let s = handle(s, "scenario")?;
        let o = handle(o, "outcome")?;
        s.inner.write_run_dir(&o.inner, Path::new(text(dir, "dir")?))?;
        Ok(())
    })
}

/// Verdict kind and persistence flag.
///
/// # Safety
/// `o` is a live handle; the out pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn inv_outcome_verdict(o: *const InvOutcome, kind: *mut InvVerdictKind, persistence: *mut bool) -> InvStatus {
    guard(|| {
        let o = handle(o, "outcome")?;
        out_ptr(kind, "kind")?;
        out_ptr(persistence, "persistence")?;
        *kind = o.inner.verdict.kind.into();
        *persistence = o.inner.verdict.persistence;
        Ok(())
    })
}

/// Fitted speed and R² of a speed probe.
///
/// # Safety
/// `o` is a live handle; `probe` is a NUL-terminated string; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn inv_outcome_speed(o: *const InvOutcome, probe: *const c_char, speed: *mut f64, r2: *mut f64) -> InvStatus {
    guard(|| {
        let o = handle(o, "outcome")?;
        let name = text(probe, "probe")?;
        out_ptr(speed, "speed")?;
        out_ptr(r2, "r2")?;
        let fit = o.inner.speeds.get(name).ok_or_else(|| Failure(InvStatus::NotFound, format!("no speed for probe {name:?}")))?;
        *speed = fit.speed;
        *r2 = fit.r2;
        Ok(())
    })
}

/// Number of recorded samples.
///
/// # Safety
/// `o` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inv_outcome_len(o: *const InvOutcome) -> usize {
    o.as_ref().map_or(0, |o| o.inner.trajectory.len())
}

/// Copies the record times (`probe` null) or one probe column into `buf`.
/// `written` receives the column length; a short buffer gives
/// `INV_STATUS_BUFFER_TOO_SMALL`.
///
/// # Safety
/// `o` is a live handle; `probe` is null or NUL-terminated; `buf` has `len` slots.
#[no_mangle]
pub unsafe extern "C" fn inv_outcome_column(o: *const InvOutcome, probe: *const c_char, buf: *mut f64, len: usize, written: *mut usize) -> InvStatus {
    guard(|| {
        let o = handle(o, "outcome")?;
        let col = if probe.is_null() {
            o.inner.trajectory.times.clone()
        } else {
            let name = text(probe, "probe")?;
            o.inner.trajectory.column(name).ok_or_else(|| Failure(InvStatus::NotFound, format!("no probe {name:?}")))?
        };
        if !written.is_null() {
            *written = col.len();
        }
        if buf.is_null() || len < col.len() {
            return Err(Failure(InvStatus::BufferTooSmall, format!("need {} slots, got {len}", col.len())));
        }
        std::ptr::copy_nonoverlapping(col.as_ptr(), buf, col.len());
        Ok(())
    })
}

/// # Safety
/// `o` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn inv_outcome_free(o: *mut InvOutcome) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Builds a reaction from JSON, e.g. `{"type":"cubic","theta":0.25,"scale":1}`.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn inv_reaction_from_json(json: *const c_char, out: *mut *mut InvReaction) -> InvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let nl: Nonlinearity = serde_json::from_str(text(json, "json")?).map_err(|e| Failure(InvStatus::Config, format!("reaction: {e}")))?;
        let r = Reaction::new(nl).map_err(|e| Failure(InvStatus::Reaction, e.to_string()))?;
        *out = Box::into_raw(Box::new(InvReaction { inner: r }));
        Ok(())
    })
}

/// `f((x, y), s)`.
///
/// # Safety
/// `r` is a live handle; `value` is writable.
#[no_mangle]
pub unsafe extern "C" fn inv_reaction_eval(r: *const InvReaction, x: f64, y: f64, s: f64, value: *mut f64) -> InvStatus {
    guard(|| {
        let r = handle(r, "reaction")?;
        out_ptr(value, "value")?;
        *value = r.inner.eval([x, y], s);
        Ok(())
    })
}

/// Lower speed bound for ellipticity `lambda <= big_lambda` and
/// `limsup q·x/|x| = q_radial`; `applicable` is false when the bound is not positive.
///
/// # Safety
/// `r` is a live handle; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn inv_w_star(r: *const InvReaction, lambda: f64, big_lambda: f64, q_radial: f64, value: *mut f64, applicable: *mut bool) -> InvStatus {
    guard(|| {
        let r = handle(r, "reaction")?;
        out_ptr(value, "value")?;
        out_ptr(applicable, "applicable")?;
        if !(lambda > 0.0 && big_lambda >= lambda) {
            return Err(Failure(InvStatus::InvalidArgument, format!("need 0 < lambda <= big_lambda, got {lambda}, {big_lambda}")));
        }
        let w = w_star(&r.inner, lambda, big_lambda, q_radial);
        *value = w.value;
        *applicable = w.applicable;
        Ok(())
    })
}

/// Speed of the 1D travelling front of `min_x f`.
///
/// # Safety
/// `r` is a live handle; `speed` is writable.
#[no_mangle]
pub unsafe extern "C" fn inv_front_speed(r: *const InvReaction, speed: *mut f64) -> InvStatus {
    guard(|| {
        let r = handle(r, "reaction")?;
        out_ptr(speed, "speed")?;
        let front = front_profile_1d(&r.inner, &FrontOptions::default()).map_err(|e| Failure(InvStatus::Stationary, e.to_string()))?;
        *speed = front.c;
        Ok(())
    })
}

/// # Safety
/// `r` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn inv_reaction_free(r: *mut InvReaction) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
