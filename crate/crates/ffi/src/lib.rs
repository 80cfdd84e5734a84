//! C interface to the signal emulator.
//!
//! States live behind opaque `QseState` handles. Every function returns a
//! `QseStatus`; on failure `qse_last_error()` describes the problem for the
//! calling thread. Handles are not thread-safe: use one per thread or lock.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qse_core::circuit::{execute, parse_program, BackendKind, ExecOptions};
use qse_core::{
    count_solutions, run_search, AmplitudeVector, BooleanOracle, EncodedState, EncodingConfig, Gate2,
    MeasurementPolicy, QseError, QubitAddress, QubitKind, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ExecutionError = 4,
    IoError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QseQubitKind {
    Frequency = 0,
    Spatial = 1,
    Time = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsePolicy {
    Born = 0,
    Argmax = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QseBackend {
    Signal = 0,
    Reference = 1,
    Both = 2,
}

/// Opaque emulated quantum state.
pub struct QseState {
    inner: EncodedState,
}

/// A 2x2 complex matrix, row major.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QseGate {
    pub re: [f64; 4],
    pub im: [f64; 4],
}

/// Outcome of a single-qubit measurement.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QseMeasurement {
    pub outcome: u8,
    pub v0: f64,
    pub v1: f64,
    pub p1: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &QseError) -> QseStatus {
    match e {
        QseError::Domain(_) => QseStatus::InvalidArgument,
        QseError::Parse(_) => QseStatus::ParseError,
        QseError::Execution { .. } => QseStatus::ExecutionError,
        QseError::Io { .. } | QseError::Format { .. } => QseStatus::IoError,
    }
}

fn fail(status: QseStatus, msg: impl Into<String>) -> QseStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), QseStatus>) -> QseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QseStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(QseStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn core<T>(r: Result<T, QseError>) -> Result<T, QseStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), QseStatus> {
    if p.is_null() {
        Err(fail(QseStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn address(kind: QseQubitKind, index: usize) -> QubitAddress {
    let kind = match kind {
        QseQubitKind::Frequency => QubitKind::Frequency,
        QseQubitKind::Spatial => QubitKind::Spatial,
        QseQubitKind::Time => QubitKind::Time,
    };
    QubitAddress { kind, index }
}

fn gate_of(g: &QseGate) -> Result<Gate2, QseStatus> {
    let c = |k: usize| C64::new(g.re[k], g.im[k]);
    let gate = Gate2 { u00: c(0), u01: c(1), u10: c(2), u11: c(3) };
    if !gate.is_finite() {
        return Err(fail(QseStatus::InvalidArgument, "gate has non-finite entries"));
    }
    Ok(gate)
}

unsafe fn state_mut<'a>(state: *mut QseState) -> Result<&'a mut QseState, QseStatus> {
    nonnull(state, "state")?;
    Ok(&mut *state)
}

unsafe fn oracle_of(table: *const u8, n_inputs: usize) -> Result<BooleanOracle, QseStatus> {
    nonnull(table, "table")?;
    if n_inputs > 30 {
        return Err(fail(QseStatus::InvalidArgument, format!("{n_inputs} oracle inputs is too many")));
    }
    let bits = std::slice::from_raw_parts(table, 1usize << n_inputs);
    core(BooleanOracle::new(n_inputs, bits.iter().map(|b| *b != 0).collect()))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn qse_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates the basis state `index` on `n_freq` frequency, `n_spatial`
/// spatial and `n_time` time qubits.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qse_state_new_basis(
    n_freq: usize,
    n_spatial: usize,
    n_time: usize,
    index: usize,
    out: *mut *mut QseState,
) -> QseStatus {
    guard(|| {
        nonnull(out, "out")?;
        let cfg = core(EncodingConfig::new(n_freq, n_spatial, n_time))?;
        let inner = core(EncodedState::basis(&cfg, index))?;
        *out = Box::into_raw(Box::new(QseState { inner }));
        Ok(())
    })
}

/// Encodes `len` amplitudes given as separate real and imaginary arrays.
///
/// # Safety
/// `re` and `im` must each point to `len` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qse_state_from_amplitudes(
    n_freq: usize,
    n_spatial: usize,
    n_time: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut QseState,
) -> QseStatus {
    guard(|| {
        nonnull(re, "re")?;
        nonnull(im, "im")?;
        nonnull(out, "out")?;
        let cfg = core(EncodingConfig::new(n_freq, n_spatial, n_time))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let amps = core(AmplitudeVector::new(re.iter().zip(im).map(|(a, b)| C64::new(*a, *b)).collect()))?;
        let inner = core(EncodedState::encode(&amps, &cfg))?;
        *out = Box::into_raw(Box::new(QseState { inner }));
        Ok(())
    })
}

/// Copies a state into a new handle.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qse_state_clone(state: *const QseState, out: *mut *mut QseState) -> QseStatus {
    guard(|| {
        nonnull(state, "state")?;
        nonnull(out, "out")?;
        *out = Box::into_raw(Box::new(QseState { inner: (*state).inner.clone() }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qse_state_free(state: *mut QseState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of amplitudes the state encodes, 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qse_state_num_amplitudes(state: *const QseState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.config.n_amplitudes())
}

/// Qubit counts of the state's current configuration.
///
/// # Safety
/// `state` must be a live handle; the three outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qse_state_shape(
    state: *const QseState,
    n_freq: *mut usize,
    n_spatial: *mut usize,
    n_time: *mut usize,
) -> QseStatus {
    guard(|| {
        nonnull(state, "state")?;
        nonnull(n_freq, "n_freq")?;
        nonnull(n_spatial, "n_spatial")?;
        nonnull(n_time, "n_time")?;
        let c = &(*state).inner.config;
        *n_freq = c.n_freq;
        *n_spatial = c.n_spatial;
        *n_time = c.n_time;
        Ok(())
    })
}

/// Decodes the state into `len` real and imaginary parts. Fails with
/// `BufferTooSmall` when `len` is under `qse_state_num_amplitudes`.
///
/// # Safety
/// `re_out` and `im_out` must each point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qse_state_decode(
    state: *const QseState,
    re_out: *mut f64,
    im_out: *mut f64,
    len: usize,
) -> QseStatus {
    guard(|| {
        nonnull(state, "state")?;
        nonnull(re_out, "re_out")?;
        nonnull(im_out, "im_out")?;
        let amps = (*state).inner.decode();
        if len < amps.len() {
            return Err(fail(
                QseStatus::BufferTooSmall,
                format!("need {} amplitudes, got room for {len}", amps.len()),
            ));
        }
        let re = std::slice::from_raw_parts_mut(re_out, amps.len());
        let im = std::slice::from_raw_parts_mut(im_out, amps.len());
        for (k, a) in amps.iter().enumerate() {
            re[k] = a.re;
            im[k] = a.im;
        }
        Ok(())
    })
}

/// Euclidean norm of the encoded amplitudes, NaN for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qse_state_norm(state: *const QseState) -> f64 {
    state.as_ref().map_or(f64::NAN, |s| s.inner.norm())
}

/// Applies a single-qubit gate in place.
///
/// # Safety
/// `state` must be a live handle and `gate` readable.
#[no_mangle]
pub unsafe extern "C" fn qse_apply_gate(
    state: *mut QseState,
    gate: *const QseGate,
    kind: QseQubitKind,
    index: usize,
) -> QseStatus {
    guard(|| {
        let st = state_mut(state)?;
        nonnull(gate, "gate")?;
        let g = gate_of(&*gate)?;
        st.inner = core(st.inner.apply_1q(&g, address(kind, index)))?;
        Ok(())
    })
}

/// Applies `gate` to the target when the control qubit is 1, in place.
///
/// # Safety
/// `state` must be a live handle and `gate` readable.
#[no_mangle]
pub unsafe extern "C" fn qse_apply_controlled(
    state: *mut QseState,
    gate: *const QseGate,
    ctrl_kind: QseQubitKind,
    ctrl_index: usize,
    target_kind: QseQubitKind,
    target_index: usize,
) -> QseStatus {
    guard(|| {
        let st = state_mut(state)?;
        nonnull(gate, "gate")?;
        let g = gate_of(&*gate)?;
        let (c, t) = (address(ctrl_kind, ctrl_index), address(target_kind, target_index));
        st.inner = core(st.inner.apply_controlled(&g, c, t))?;
        Ok(())
    })
}

/// Applies the oracle of a truth table (`2^n_inputs` bytes, nonzero = 1) to
/// frequency qubits `1..=n_inputs`, output on frequency qubit 0.
///
/// # Safety
/// `state` must be a live handle; `table` must hold `2^n_inputs` bytes.
#[no_mangle]
pub unsafe extern "C" fn qse_apply_oracle(
    state: *mut QseState,
    table: *const u8,
    n_inputs: usize,
) -> QseStatus {
    guard(|| {
        let st = state_mut(state)?;
        let f = oracle_of(table, n_inputs)?;
        st.inner = core(st.inner.apply_oracle(&f))?;
        Ok(())
    })
}

/// Adds complex Gaussian noise at `snr_db` in place.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qse_add_noise(state: *mut QseState, snr_db: f64, seed: u64) -> QseStatus {
    guard(|| {
        let st = state_mut(state)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        st.inner = core(st.inner.add_noise(snr_db, &mut rng))?;
        Ok(())
    })
}

/// Measures one qubit and collapses the state in place; the qubit is removed
/// and higher qubits of the same kind shift down by one.
///
/// # Safety
/// `state` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qse_measure(
    state: *mut QseState,
    kind: QseQubitKind,
    index: usize,
    policy: QsePolicy,
    seed: u64,
    result: *mut QseMeasurement,
) -> QseStatus {
    guard(|| {
        let st = state_mut(state)?;
        nonnull(result, "result")?;
        let policy = match policy {
            QsePolicy::Born => MeasurementPolicy::Born,
            QsePolicy::Argmax => MeasurementPolicy::Argmax,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rec, next) = core(st.inner.measure(address(kind, index), policy, &mut rng))?;
        st.inner = next;
        *result = QseMeasurement { outcome: rec.outcome, v0: rec.v0, v1: rec.v1, p1: rec.p1 };
        Ok(())
    })
}

/// Parses and runs a circuit program, returning its JSON report in
/// `report_out` (free with `qse_string_free`). Relative oracle paths resolve
/// against the current directory.
///
/// # Safety
/// `program` must be a NUL-terminated string; `report_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qse_run_program(
    program: *const c_char,
    backend: QseBackend,
    seed: u64,
    report_out: *mut *mut c_char,
) -> QseStatus {
    guard(|| {
        nonnull(program, "program")?;
        nonnull(report_out, "report_out")?;
        let text = CStr::from_ptr(program)
            .to_str()
            .map_err(|_| fail(QseStatus::InvalidArgument, "program is not UTF-8"))?;
        let parsed = parse_program(text).map_err(|e| fail(QseStatus::ParseError, e.to_string()))?;
        let backend = match backend {
            QseBackend::Signal => BackendKind::Signal,
            QseBackend::Reference => BackendKind::Reference,
            QseBackend::Both => BackendKind::Both,
        };
        let run = core(execute(&parsed, &ExecOptions { backend, seed, ..Default::default() }))?;
        let json =
            CString::new(run.report.to_json()).map_err(|_| fail(QseStatus::Panic, "report contains NUL"))?;
        *report_out = json.into_raw();
        Ok(())
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qse_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Single-query search over a truth table. Writes up to `capacity` solution
/// indices to `solutions` and the total found to `n_found`; returns
/// `BufferTooSmall` (after filling `n_found`) if they do not fit.
///
/// # Safety
/// `table` must hold `2^n_inputs` bytes, `solutions` must have room for
/// `capacity` entries (may be null when `capacity` is 0), `n_found` writable.
#[no_mangle]
pub unsafe extern "C" fn qse_search(
    table: *const u8,
    n_inputs: usize,
    snr_db: f64,
    seed: u64,
    solutions: *mut usize,
    capacity: usize,
    n_found: *mut usize,
) -> QseStatus {
    guard(|| {
        nonnull(n_found, "n_found")?;
        let f = oracle_of(table, n_inputs)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snr = (snr_db != f64::INFINITY).then_some(snr_db);
        let out = core(run_search(&f, snr, &mut rng))?;
        *n_found = out.solutions.len();
        if out.solutions.len() > capacity {
            return Err(fail(
                QseStatus::BufferTooSmall,
                format!("{} solutions, room for {capacity}", out.solutions.len()),
            ));
        }
        if !out.solutions.is_empty() {
            nonnull(solutions, "solutions")?;
            std::slice::from_raw_parts_mut(solutions, out.solutions.len()).copy_from_slice(&out.solutions);
        }
        Ok(())
    })
}

/// Estimated number of solutions of a truth table from one oracle query.
///
/// # Safety
/// `table` must hold `2^n_inputs` bytes; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qse_count_solutions(
    table: *const u8,
    n_inputs: usize,
    snr_db: f64,
    seed: u64,
    count: *mut usize,
) -> QseStatus {
    guard(|| {
        nonnull(count, "count")?;
        let f = oracle_of(table, n_inputs)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snr = (snr_db != f64::INFINITY).then_some(snr_db);
        *count = core(count_solutions(&f, snr, &mut rng))?.0;
        Ok(())
    })
}
