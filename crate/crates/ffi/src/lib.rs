//! C ABI over the `besn` simulator.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_generate`
//! style functions and released by the matching `*_free`. Every fallible call
//! returns a [`BesnStatus`]; on failure a message for the calling thread is
//! available from [`besn_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;
use std::slice;

use besn::dynamics::{run_with, step, RunConfig, StepConfig, ZeroFieldRule};
use besn::metrics;
use besn::rng::{self, SimRng};
use besn::theory::{self, CriticalDegree};
use besn::{generate_reservoir, Error, Reservoir, ReservoirParams, SignalKind, SignalSpec, State};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    IndexOutOfRange = 4,
    MissingRng = 5,
    Io = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesnSignalKind {
    Zero = 0,
    WhiteNoise = 1,
    Multisine = 2,
}

/// Output of a neuron whose local field is exactly zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesnZeroField {
    Positive = 0,
    Hold = 1,
}

pub struct BesnReservoir(Reservoir);

pub struct BesnState(State);

pub struct BesnRng(SimRng);

pub struct BesnTrajectory(besn::Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: BesnStatus,
    message: String,
}

impl Failure {
    fn new(status: BesnStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

fn status_of(e: &Error) -> BesnStatus {
    match e {
        Error::DimensionMismatch { .. } => BesnStatus::DimensionMismatch,
        Error::IndexOutOfRange { .. } => BesnStatus::IndexOutOfRange,
        Error::MissingRng => BesnStatus::MissingRng,
        Error::Io { .. } => BesnStatus::Io,
        Error::Cell { source, .. } => status_of(source),
        _ => BesnStatus::InvalidArgument,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(status_of(&e), e.to_string())
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> BesnStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            BesnStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_last_error("internal panic");
            BesnStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(BesnStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(BesnStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::new(
            BesnStatus::NullPointer,
            format!("`{name}` is null"),
        ));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn expect_len(expected: usize, actual: usize) -> Result<(), Failure> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual }.into())
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies the calling thread's last error message into `buf` (NUL terminated,
/// truncated to `capacity`) and returns its full length in bytes. Returns 0
/// when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn besn_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(message) = slot.as_ref() else {
            if !buf.is_null() && capacity > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = message.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL terminated string.
#[no_mangle]
pub extern "C" fn besn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Samples a reservoir with `n` neurons, mean degree `k` and asymmetry `d`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn besn_reservoir_generate(
    n: usize,
    k: f64,
    d: f64,
    seed: u64,
    out: *mut *mut BesnReservoir,
) -> BesnStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        let reservoir = generate_reservoir(ReservoirParams::new(n, k, d, seed))?;
        *out = boxed(BesnReservoir(reservoir));
        Ok(())
    })
}

/// # Safety
/// `reservoir` must be null or a handle from [`besn_reservoir_generate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn besn_reservoir_free(reservoir: *mut BesnReservoir) {
    release(reservoir)
}

/// Neuron count, 0 for a null handle.
///
/// # Safety
/// `reservoir` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_reservoir_n_neurons(reservoir: *const BesnReservoir) -> usize {
    reservoir.as_ref().map_or(0, |r| r.0.n_neurons())
}

/// Number of nonzero weights, 0 for a null handle.
///
/// # Safety
/// `reservoir` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_reservoir_link_count(reservoir: *const BesnReservoir) -> usize {
    reservoir.as_ref().map_or(0, |r| r.0.link_count())
}

/// Writes the row-major `n * n` weight matrix into `out`.
///
/// # Safety
/// `reservoir` must be a live handle and `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn besn_reservoir_to_dense(
    reservoir: *const BesnReservoir,
    out: *mut i8,
    len: usize,
) -> BesnStatus {
    guard(|| {
        let r = &borrow(reservoir, "reservoir")?.0;
        let n = r.n_neurons();
        expect_len(n * n, len)?;
        let out = out_slice(out, len, "out")?;
        out.fill(0);
        for (i, j, w) in r.triples() {
            out[i * n + j] = w;
        }
        Ok(())
    })
}

/// Builds a state from `len` entries, each `-1` or `+1`.
///
/// # Safety
/// `signs` must point to `len` readable bytes and `out` to storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn besn_state_from_signs(
    signs: *const i8,
    len: usize,
    out: *mut *mut BesnState,
) -> BesnStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        let signs: &[i8] = if len == 0 {
            &[]
        } else {
            slice::from_raw_parts(borrow(signs, "signs")?, len)
        };
        *out = boxed(BesnState(State::from_signs(signs)?));
        Ok(())
    })
}

/// Random state whose entries are `+1` with probability `bias`, drawn from
/// the initial-state stream of `seed`.
///
/// # Safety
/// `out` must point to storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn besn_state_random(
    n: usize,
    bias: f64,
    seed: u64,
    out: *mut *mut BesnState,
) -> BesnStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        let mut rng = rng::stream(seed, rng::streams::INITIAL_STATE);
        *out = boxed(BesnState(State::random(n, bias, &mut rng)?));
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_state_free(state: *mut BesnState) {
    release(state)
}

/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_state_len(state: *const BesnState) -> usize {
    state.as_ref().map_or(0, |s| s.0.len())
}

/// Writes the `len` entries of `state` as `-1`/`+1` bytes.
///
/// # Safety
/// `state` must be a live handle and `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn besn_state_to_signs(
    state: *const BesnState,
    out: *mut i8,
    len: usize,
) -> BesnStatus {
    guard(|| {
        let s = &borrow(state, "state")?.0;
        expect_len(s.len(), len)?;
        let out = out_slice(out, len, "out")?;
        for (slot, v) in out.iter_mut().zip(s.iter()) {
            *slot = v;
        }
        Ok(())
    })
}

/// Random stream `stream` of `seed`.
///
/// # Safety
/// `out` must point to storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn besn_rng_new(
    seed: u64,
    stream: u64,
    out: *mut *mut BesnRng,
) -> BesnStatus {
    guard(|| {
        *borrow_mut(out, "out")? = boxed(BesnRng(rng::stream(seed, stream)));
        Ok(())
    })
}

/// # Safety
/// `rng` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_rng_free(rng: *mut BesnRng) {
    release(rng)
}

fn zero_field(rule: BesnZeroField) -> ZeroFieldRule {
    match rule {
        BesnZeroField::Positive => ZeroFieldRule::Positive,
        BesnZeroField::Hold => ZeroFieldRule::Hold,
    }
}

/// One synchronous update with scalar input `input`. `rng` may be null when
/// `noise_gain` is zero.
///
/// # Safety
/// `reservoir` and `state` must be live handles, `rng` null or live, and
/// `out` must point to storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn besn_step(
    reservoir: *const BesnReservoir,
    state: *const BesnState,
    input: f64,
    noise_gain: f64,
    rule: BesnZeroField,
    rng: *mut BesnRng,
    out: *mut *mut BesnState,
) -> BesnStatus {
    guard(|| {
        let r = &borrow(reservoir, "reservoir")?.0;
        let s = &borrow(state, "state")?.0;
        let out = borrow_mut(out, "out")?;
        let cfg = StepConfig {
            zero_field: zero_field(rule),
            ..StepConfig::for_reservoir(r, noise_gain, input)
        };
        let rng = rng.as_mut().map(|g| &mut g.0);
        *out = boxed(BesnState(step(r, s, &cfg, rng)?));
        Ok(())
    })
}

/// Simulates `horizon` steps from `initial`. White noise drive draws from
/// `signal_seed`; per-neuron noise draws from `rng`, which may be null when
/// `noise_gain` is zero.
///
/// # Safety
/// `reservoir` and `initial` must be live handles, `rng` null or live, and
/// `out` must point to storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn besn_run(
    reservoir: *const BesnReservoir,
    initial: *const BesnState,
    signal: BesnSignalKind,
    signal_gain: f64,
    signal_seed: u64,
    noise_gain: f64,
    horizon: usize,
    rule: BesnZeroField,
    rng: *mut BesnRng,
    out: *mut *mut BesnTrajectory,
) -> BesnStatus {
    guard(|| {
        let r = &borrow(reservoir, "reservoir")?.0;
        let x0 = &borrow(initial, "initial")?.0;
        let out = borrow_mut(out, "out")?;
        let kind = match signal {
            BesnSignalKind::Zero => SignalKind::Zero,
            BesnSignalKind::WhiteNoise => SignalKind::WhiteNoise,
            BesnSignalKind::Multisine => SignalKind::Multisine,
        };
        let cfg = RunConfig {
            signal: SignalSpec::of_kind(kind, signal_gain, signal_seed),
            noise_gain,
            horizon,
            zero_field: zero_field(rule),
        };
        let rng = rng.as_mut().map(|g| &mut g.0);
        *out = boxed(BesnTrajectory(run_with(r, x0, &cfg, rng)?));
        Ok(())
    })
}

/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_trajectory_free(trajectory: *mut BesnTrajectory) {
    release(trajectory)
}

/// Number of stored states, `horizon + 1`.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_trajectory_len(trajectory: *const BesnTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.len())
}

/// Copy of the state at step `n`.
///
/// # Safety
/// `trajectory` must be a live handle and `out` must point to storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn besn_trajectory_state(
    trajectory: *const BesnTrajectory,
    n: usize,
    out: *mut *mut BesnState,
) -> BesnStatus {
    guard(|| {
        let t = &borrow(trajectory, "trajectory")?.0;
        let out = borrow_mut(out, "out")?;
        let state = t.states.get(n).ok_or(Error::IndexOutOfRange {
            index: n,
            len: t.len(),
        })?;
        *out = boxed(BesnState(state.clone()));
        Ok(())
    })
}

/// Writes energy, activity and entropy per step. Each buffer must hold
/// exactly the trajectory length; any of them may be null to skip it.
/// Activity at step 0 is written as NaN.
///
/// # Safety
/// `trajectory` must be a live handle; non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn besn_trajectory_indicators(
    trajectory: *const BesnTrajectory,
    energy: *mut f64,
    activity: *mut f64,
    entropy: *mut f64,
    len: usize,
) -> BesnStatus {
    guard(|| {
        let t = &borrow(trajectory, "trajectory")?.0;
        expect_len(t.len(), len)?;
        let ind = &t.indicators;
        if !energy.is_null() {
            out_slice(energy, len, "energy")?.copy_from_slice(&ind.energy);
        }
        if !activity.is_null() {
            for (slot, a) in out_slice(activity, len, "activity")?
                .iter_mut()
                .zip(&ind.activity)
            {
                *slot = a.unwrap_or(f64::NAN);
            }
        }
        if !entropy.is_null() {
            out_slice(entropy, len, "entropy")?.copy_from_slice(&ind.entropy);
        }
        Ok(())
    })
}

/// Entropy averaged over steps `t0..=t_end`.
///
/// # Safety
/// `trajectory` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn besn_trajectory_mean_entropy(
    trajectory: *const BesnTrajectory,
    t0: usize,
    t_end: usize,
    out: *mut f64,
) -> BesnStatus {
    guard(|| {
        let t = &borrow(trajectory, "trajectory")?.0;
        let out = borrow_mut(out, "out")?;
        *out = metrics::mean_entropy(t, t0, t_end)?;
        Ok(())
    })
}

/// Binary entropy of the positive fraction; NaN for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_entropy(state: *const BesnState) -> f64 {
    state.as_ref().map_or(f64::NAN, |s| metrics::entropy(&s.0))
}

/// Mean entry; NaN for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn besn_energy(state: *const BesnState) -> f64 {
    state.as_ref().map_or(f64::NAN, |s| metrics::energy(&s.0))
}

/// Normalized Hamming distance.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn besn_hamming(
    a: *const BesnState,
    b: *const BesnState,
    out: *mut f64,
) -> BesnStatus {
    guard(|| {
        let (a, b) = (&borrow(a, "a")?.0, &borrow(b, "b")?.0);
        *borrow_mut(out, "out")? = metrics::hamming(a, b)?;
        Ok(())
    })
}

/// `1 / (2 d^2)`, infinity at `d = 0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn besn_critical_degree(d: f64, out: *mut f64) -> BesnStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = match theory::critical_degree(d)? {
            CriticalDegree::Finite(k) => k,
            CriticalDegree::AlwaysChaotic => f64::INFINITY,
        };
        Ok(())
    })
}

/// `1 / sqrt(2 k)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn besn_critical_asymmetry(k: f64, out: *mut f64) -> BesnStatus {
    guard(|| {
        *borrow_mut(out, "out")? = theory::critical_asymmetry(k)?;
        Ok(())
    })
}

/// Whether `(k, d)` lies on the chaotic side of the annealed criterion.
#[no_mangle]
pub extern "C" fn besn_chaos_condition(k: f64, d: f64) -> bool {
    theory::chaos_condition(k, d)
}
