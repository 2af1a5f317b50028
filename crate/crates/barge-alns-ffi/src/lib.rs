//! C interface for the scheduling solver.
//!
//! Instances and solutions cross the boundary as opaque handles created and
//! destroyed here; strings are UTF-8, NUL-terminated, and owned by whoever
//! the function documentation says. Every function checks its pointers and
//! reports problems through [`BargeStatus`] instead of crashing.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use barge_alns::generate::{generate, Topology};
use barge_alns::model::RawSolution;
use barge_alns::oracle;
use barge_alns::{export_lp, loss, validate, Instance, MipConfig, SearchConfig, Solution};

/// Outcome of a call. Anything but `Ok` leaves the out-parameters untouched.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BargeStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The instance JSON failed to parse or validate.
    BadInstance = 3,
    /// The solution JSON failed to parse or does not fit the instance.
    BadSolution = 4,
    /// The preset row or topology is not in the catalogue.
    UnknownPreset = 5,
    /// The request exceeds a hard size limit.
    TooLarge = 6,
    /// A search option is outside its valid range.
    BadOptions = 7,
    /// No result exists for the request.
    NoResult = 8,
    /// An unexpected internal failure was contained.
    Internal = 9,
}

/// Opaque handle to a validated instance.
pub struct BargeInstance {
    inner: Instance,
}

/// Opaque handle to a solution for one specific instance.
pub struct BargeSolution {
    inner: Solution,
}

/// Port layout used by the instance generator.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BargeTopology {
    Oceanic = 0,
    Inland = 1,
}

/// Search parameters; obtain defaults from [`barge_search_defaults`] and
/// override fields as needed. A `time_limit` of zero or below means no
/// wall-clock cap.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BargeSearchOptions {
    pub seed: u64,
    pub iterations: usize,
    pub multistart: usize,
    pub stagnation: usize,
    pub time_limit: f64,
    pub family_bias: u32,
    pub t_init: f64,
    pub cooling: f64,
    pub t_min: f64,
}

/// Default search parameters, matching the command-line tool.
#[no_mangle]
pub extern "C" fn barge_search_defaults() -> BargeSearchOptions {
    let cfg = SearchConfig::default();
    BargeSearchOptions {
        seed: cfg.seed,
        iterations: cfg.iterations,
        multistart: cfg.multistart,
        stagnation: cfg.stagnation_limit,
        time_limit: 0.0,
        family_bias: cfg.family_bias,
        t_init: cfg.t_init,
        cooling: cfg.cooling,
        t_min: cfg.t_min,
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, BargeStatus> {
    if ptr.is_null() {
        return Err(BargeStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| BargeStatus::InvalidUtf8)
}

fn give_string(text: String) -> *mut c_char {
    match CString::new(text) {
        Ok(c) => c.into_raw(),
        Err(_) => ptr::null_mut(),
    }
}

/// Parse and validate an instance from its JSON document.
///
/// On success `*out` owns a new handle; release it with
/// [`barge_instance_free`].
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to a writable
/// pointer slot; both stay borrowed only for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn barge_instance_parse(
    json: *const c_char,
    out: *mut *mut BargeInstance,
) -> BargeStatus {
    if out.is_null() {
        return BargeStatus::NullArgument;
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match Instance::from_json(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(BargeInstance { inner }));
            BargeStatus::Ok
        }
        Err(_) => BargeStatus::BadInstance,
    }
}

/// Build a benchmark instance from the preset catalogue (rows 1 to 6).
///
/// # Safety
/// `out` must point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn barge_instance_generate(
    row: u8,
    topology: BargeTopology,
    seed: u64,
    out: *mut *mut BargeInstance,
) -> BargeStatus {
    if out.is_null() {
        return BargeStatus::NullArgument;
    }
    let topo = match topology {
        BargeTopology::Oceanic => Topology::Oceanic,
        BargeTopology::Inland => Topology::Inland,
    };
    match generate(row, topo, seed) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(BargeInstance { inner }));
            BargeStatus::Ok
        }
        Err(_) => BargeStatus::UnknownPreset,
    }
}

/// Instance as pretty-printed JSON. Returns null on a null handle; free the
/// string with [`barge_string_free`].
///
/// # Safety
/// `inst` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn barge_instance_json(inst: *const BargeInstance) -> *mut c_char {
    match inst.as_ref() {
        Some(h) => give_string(h.inner.to_json()),
        None => ptr::null_mut(),
    }
}

/// Release an instance handle; null is ignored.
///
/// # Safety
/// `inst` must be a handle from this library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn barge_instance_free(inst: *mut BargeInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

fn options_to_config(opt: &BargeSearchOptions) -> Result<SearchConfig, BargeStatus> {
    if opt.family_bias == 0
        || opt.multistart == 0
        || !(0.0..1.0).contains(&opt.cooling)
        || opt.t_init <= 0.0
        || opt.t_min <= 0.0
    {
        return Err(BargeStatus::BadOptions);
    }
    Ok(SearchConfig {
        seed: opt.seed,
        iterations: opt.iterations,
        time_limit: (opt.time_limit > 0.0).then_some(opt.time_limit),
        stagnation_limit: opt.stagnation,
        t_init: opt.t_init,
        cooling: opt.cooling,
        t_min: opt.t_min,
        family_bias: opt.family_bias,
        multistart: opt.multistart,
        ..SearchConfig::default()
    })
}

/// Run the search and hand back the best solution found.
///
/// `options` may be null for defaults. Release `*out` with
/// [`barge_solution_free`].
///
/// # Safety
/// `inst` must be a live handle; `options`, when non-null, must point to a
/// readable options struct; `out` must be a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn barge_solve(
    inst: *const BargeInstance,
    options: *const BargeSearchOptions,
    out: *mut *mut BargeSolution,
) -> BargeStatus {
    let Some(handle) = inst.as_ref() else {
        return BargeStatus::NullArgument;
    };
    if out.is_null() {
        return BargeStatus::NullArgument;
    }
    let opt = match options.as_ref() {
        Some(o) => *o,
        None => barge_search_defaults(),
    };
    let cfg = match options_to_config(&opt) {
        Ok(c) => c,
        Err(s) => return s,
    };
    let solved = catch_unwind(AssertUnwindSafe(|| barge_alns::solve(&handle.inner, &cfg)));
    match solved {
        Ok(outcome) => {
            *out = Box::into_raw(Box::new(BargeSolution { inner: outcome.best }));
            BargeStatus::Ok
        }
        Err(_) => BargeStatus::Internal,
    }
}

/// Exact optimum by exhaustive enumeration; only for tiny instances.
///
/// Fails with `TooLarge` beyond the enumeration limit and `NoResult` when
/// no capacity-feasible schedule exists.
///
/// # Safety
/// Same contract as [`barge_solve`].
#[no_mangle]
pub unsafe extern "C" fn barge_oracle(
    inst: *const BargeInstance,
    out: *mut *mut BargeSolution,
) -> BargeStatus {
    let Some(handle) = inst.as_ref() else {
        return BargeStatus::NullArgument;
    };
    if out.is_null() {
        return BargeStatus::NullArgument;
    }
    match oracle::optimum(&handle.inner) {
        Ok(Some(c)) => {
            *out = Box::into_raw(Box::new(BargeSolution { inner: c.solution }));
            BargeStatus::Ok
        }
        Ok(None) => BargeStatus::NoResult,
        Err(_) => BargeStatus::TooLarge,
    }
}

/// Parse a solution JSON document against its instance.
///
/// # Safety
/// `inst` must be a live handle, `json` a NUL-terminated string, `out` a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn barge_solution_parse(
    inst: *const BargeInstance,
    json: *const c_char,
    out: *mut *mut BargeSolution,
) -> BargeStatus {
    let Some(handle) = inst.as_ref() else {
        return BargeStatus::NullArgument;
    };
    if out.is_null() {
        return BargeStatus::NullArgument;
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let raw: RawSolution = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(_) => return BargeStatus::BadSolution,
    };
    match Solution::from_raw(&raw, &handle.inner) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(BargeSolution { inner }));
            BargeStatus::Ok
        }
        Err(_) => BargeStatus::BadSolution,
    }
}

/// Solution as pretty-printed JSON with schedule and loss attached.
/// Returns null when either handle is null; free with
/// [`barge_string_free`].
///
/// # Safety
/// Both handles must be live handles from this library or null.
#[no_mangle]
pub unsafe extern "C" fn barge_solution_json(
    inst: *const BargeInstance,
    sol: *const BargeSolution,
) -> *mut c_char {
    let (Some(i), Some(s)) = (inst.as_ref(), sol.as_ref()) else {
        return ptr::null_mut();
    };
    let raw = s.inner.to_raw(&i.inner, true);
    match serde_json::to_string_pretty(&raw) {
        Ok(text) => give_string(text),
        Err(_) => ptr::null_mut(),
    }
}

/// Total loss of a solution; NaN when a handle is null or the schedule
/// cannot be evaluated.
///
/// # Safety
/// Both handles must be live handles from this library or null.
#[no_mangle]
pub unsafe extern "C" fn barge_solution_loss(
    inst: *const BargeInstance,
    sol: *const BargeSolution,
) -> f64 {
    let (Some(i), Some(s)) = (inst.as_ref(), sol.as_ref()) else {
        return f64::NAN;
    };
    match loss(&i.inner, &s.inner) {
        Ok(b) => b.total,
        Err(_) => f64::NAN,
    }
}

/// Number of hard-constraint violations; -1 when a handle is null.
///
/// # Safety
/// Both handles must be live handles from this library or null.
#[no_mangle]
pub unsafe extern "C" fn barge_validate(
    inst: *const BargeInstance,
    sol: *const BargeSolution,
) -> isize {
    let (Some(i), Some(s)) = (inst.as_ref(), sol.as_ref()) else {
        return -1;
    };
    validate(&i.inner, &s.inner).len() as isize
}

/// Export the integer program in CPLEX LP format.
///
/// On success `*out` receives a string to free with
/// [`barge_string_free`].
///
/// # Safety
/// `inst` must be a live handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn barge_export_lp(
    inst: *const BargeInstance,
    out: *mut *mut c_char,
) -> BargeStatus {
    let Some(handle) = inst.as_ref() else {
        return BargeStatus::NullArgument;
    };
    if out.is_null() {
        return BargeStatus::NullArgument;
    }
    match export_lp(&handle.inner, &MipConfig::default()) {
        Ok(text) => {
            *out = give_string(text);
            BargeStatus::Ok
        }
        Err(_) => BargeStatus::TooLarge,
    }
}

/// Release a solution handle; null is ignored.
///
/// # Safety
/// `sol` must be a handle from this library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn barge_solution_free(sol: *mut BargeSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Release a string returned by this library; null is ignored.
///
/// # Safety
/// `text` must come from this library and not have been freed yet.
#[no_mangle]
pub unsafe extern "C" fn barge_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
