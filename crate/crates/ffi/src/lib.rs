//! C ABI over `ksmagic`.
//!
//! Every entry point returns a [`KsStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`ks_last_error_message`]. Arrays and states are opaque handles owned by
//! the caller and released with their `_free` function. Strings returned by
//! the library are released with [`ks_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ksmagic::quantum::{estimate_xks_with, exact_xks_form};
use ksmagic::report::ConvergenceRow;
use ksmagic::{
    brute_max, find_contradiction_perm, make_state, Budget, Error, MagicArray, PauliString, Permutation, StateKind,
    Statevector, XksForm,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    NotFound = 3,
    BudgetExceeded = 4,
    Internal = 5,
    Panic = 6,
}

/// `R1 + R2 + Σ Cj + 1 − R3·C_{q+1}`
pub const KS_FORM_GENERAL: u32 = 0;
/// `R1 + R2 + R3 + C1 + C2 − C3`, q = 2 only
pub const KS_FORM_TWO_QUBIT: u32 = 1;

/// Opaque magic array.
pub struct KsArray {
    inner: MagicArray,
}

/// Opaque statevector.
pub struct KsState {
    inner: Statevector,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KsBound {
    pub classical_max: i64,
    pub quantum_value: i64,
    pub search_space_size: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub exact: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsConvergenceRow {
    pub q: u64,
    pub classical_bound: u64,
    pub quantum_value: u64,
    pub ratio: f64,
    pub gap: f64,
    pub ghz_comparator: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(KsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::BudgetExceeded { .. } => KsStatus::BudgetExceeded,
            Error::Internal(_) => KsStatus::Internal,
            _ => KsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KsStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            KsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(KsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(KsStatus::InvalidArgument, msg.into())
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn array_ref<'a>(p: *const KsArray) -> Result<&'a MagicArray, Failure> {
    p.as_ref().map(|a| &a.inner).ok_or_else(|| null("array"))
}

unsafe fn state_ref<'a>(p: *const KsState) -> Result<&'a Statevector, Failure> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

fn form_arg(form: u32) -> Result<XksForm, Failure> {
    match form {
        KS_FORM_GENERAL => Ok(XksForm::General),
        KS_FORM_TWO_QUBIT => Ok(XksForm::TwoQubit),
        _ => Err(invalid(format!("unknown form {form}"))),
    }
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| Failure(KsStatus::Internal, "string contains NUL".into()))
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn ks_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ks_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Product `a·b` of two Pauli strings in text form such as `"-iXYZ"`.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_pauli_mul(a: *const c_char, b: *const c_char, out: *mut *mut c_char) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let a = PauliString::parse(str_arg(a, "a")?)?;
        let b = PauliString::parse(str_arg(b, "b")?)?;
        *out = to_c_string(a.mul(&b)?.to_string())?;
        Ok(())
    })
}

/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_pauli_commutes(a: *const c_char, b: *const c_char, out: *mut bool) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let a = PauliString::parse(str_arg(a, "a")?)?;
        let b = PauliString::parse(str_arg(b, "b")?)?;
        *out = a.commutes(&b)?;
        Ok(())
    })
}

/// Builds the array for a derangement given as `len` 1-based images.
///
/// # Safety
/// `perm` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_array_build(q: usize, perm: *const usize, len: usize, out: *mut *mut KsArray) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if perm.is_null() {
            return Err(null("perm"));
        }
        let images = std::slice::from_raw_parts(perm, len).to_vec();
        let inner = MagicArray::build(q, &Permutation::new(images)?)?;
        *out = Box::into_raw(Box::new(KsArray { inner }));
        Ok(())
    })
}

/// First contradiction array for `q` qubits. Returns `NotFound` when none
/// exists under the requested constraint.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_array_find_contradiction(
    q: usize,
    require_commuting: bool,
    out: *mut *mut KsArray,
) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let perm = find_contradiction_perm(q, require_commuting)?
            .ok_or_else(|| Failure(KsStatus::NotFound, format!("no contradiction array for q = {q}")))?;
        *out = Box::into_raw(Box::new(KsArray { inner: MagicArray::build(q, &perm)? }));
        Ok(())
    })
}

/// # Safety
/// `array` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ks_array_free(array: *mut KsArray) {
    if !array.is_null() {
        drop(Box::from_raw(array));
    }
}

/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_array_q(array: *const KsArray, out: *mut usize) -> KsStatus {
    guard(|| {
        *out_ref(out, "out")? = array_ref(array)?.q();
        Ok(())
    })
}

/// Number of `j` with `π(j) < j`.
///
/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_array_m(array: *const KsArray, out: *mut usize) -> KsStatus {
    guard(|| {
        *out_ref(out, "out")? = array_ref(array)?.m();
        Ok(())
    })
}

/// Writes +1 or −1.
///
/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_array_grand_product(array: *const KsArray, out: *mut i32) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let phase = array_ref(array)?.grand_product()?;
        *out = phase.as_sign().map(i32::from).ok_or_else(|| Failure(KsStatus::Internal, format!("{phase}")))?;
        Ok(())
    })
}

/// Cell at 1-based `(row, col)` in text form. Free with `ks_string_free`.
///
/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_array_cell(
    array: *const KsArray,
    row: usize,
    col: usize,
    out: *mut *mut c_char,
) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = to_c_string(array_ref(array)?.cell(row, col)?.to_string())?;
        Ok(())
    })
}

/// JSON document `{q, perm, grid}`. Free with `ks_string_free`.
///
/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_array_to_json(array: *const KsArray, out: *mut *mut c_char) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let doc = array_ref(array)?.to_document();
        let json = serde_json::to_string(&doc).map_err(|e| Failure(KsStatus::Internal, e.to_string()))?;
        *out = to_c_string(json)?;
        Ok(())
    })
}

/// Exhaustive classical maximum. `max_qubits` = 0 uses the default budget.
///
/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_classical_brute_max(
    array: *const KsArray,
    form: u32,
    max_qubits: usize,
    out: *mut KsBound,
) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let budget = if max_qubits == 0 { Budget::default() } else { Budget { max_qubits } };
        let r = brute_max(array_ref(array)?, form_arg(form)?, budget)?;
        *out = KsBound {
            classical_max: r.classical_max,
            quantum_value: r.quantum_value,
            search_space_size: r.search_space_size,
        };
        Ok(())
    })
}

unsafe fn new_state(kind: StateKind, q: usize, out: *mut *mut KsState) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(KsState { inner: make_state(kind, q)? }));
        Ok(())
    })
}

/// Computational basis state; qubit 1 is the most significant bit of `index`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_state_new_basis(q: usize, index: u64, out: *mut *mut KsState) -> KsStatus {
    new_state(StateKind::Basis(index), q, out)
}

/// Haar-random state, reproducible from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_state_new_random(q: usize, seed: u64, out: *mut *mut KsState) -> KsStatus {
    new_state(StateKind::Random(seed), q, out)
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_state_new_ghz(q: usize, out: *mut *mut KsState) -> KsStatus {
    new_state(StateKind::Ghz, q, out)
}

/// # Safety
/// `state` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ks_state_free(state: *mut KsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `array` and `state` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_exact_xks(
    array: *const KsArray,
    form: u32,
    state: *const KsState,
    out: *mut f64,
) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = exact_xks_form(array_ref(array)?, form_arg(form)?, state_ref(state)?)?;
        Ok(())
    })
}

/// Shot-based estimate with readout flip probability `epsilon`.
///
/// # Safety
/// `array` and `state` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_estimate_xks(
    array: *const KsArray,
    form: u32,
    state: *const KsState,
    shots: u64,
    epsilon: f64,
    seed: u64,
    out: *mut KsEstimate,
) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let est = estimate_xks_with(
            array_ref(array)?,
            form_arg(form)?,
            state_ref(state)?,
            shots,
            epsilon,
            &mut rng,
            &mut |_| Ok(()),
        )?;
        *out = KsEstimate { value: est.value, standard_error: est.standard_error, exact: est.exact };
        Ok(())
    })
}

/// One row of the convergence table.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_converge_row(q: u64, epsilon: f64, out: *mut KsConvergenceRow) -> KsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if q < 2 {
            return Err(invalid(format!("q must be at least 2, got {q}")));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(invalid(format!("epsilon must lie in (0, 0.5), got {epsilon}")));
        }
        let r = ConvergenceRow::new(q, epsilon);
        *out = KsConvergenceRow {
            q: r.q,
            classical_bound: r.classical_bound,
            quantum_value: r.quantum_value,
            ratio: r.ratio,
            gap: r.gap,
            ghz_comparator: r.ghz_comparator,
        };
        Ok(())
    })
}
