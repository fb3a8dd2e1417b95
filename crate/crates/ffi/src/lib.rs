//! C ABI for the `bpqm` library.
//!
//! Codes are opaque [`BpqmCode`] handles created by `bpqm_code_*` functions
//! and released with [`bpqm_code_free`]. Every fallible call returns a
//! [`BpqmStatus`] and writes its result through an out-pointer; the message
//! of the most recent failure on the calling thread is available from
//! [`bpqm_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bpqm::codes::{builtin_code, load_code, BinaryLinearCode};
use bpqm::mpbpqm::{mp_bit_success, QuantGrid};
use bpqm::nontree::{nontree_bit_success, Cloner};
use bpqm::oracles::{classical_map_success, helstrom_bit_success, pgm_block_success, Target};
use bpqm::qsim::{self, bpqm_block_success_average, default_order};
use bpqm::BpqmError;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpqmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A size guard was exceeded (code too long, too many codewords, ...).
    Guard = 3,
    NotTree = 4,
    RankDeficient = 5,
    UnknownCode = 6,
    BitOutOfRange = 7,
    Io = 8,
    /// An internal panic was caught.
    Panic = 9,
}

/// Opaque handle to a binary linear code.
pub struct BpqmCode {
    inner: BinaryLinearCode,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &BpqmError) -> BpqmStatus {
    match e {
        BpqmError::RankDeficient { .. } => BpqmStatus::RankDeficient,
        BpqmError::Malformed(_) | BpqmError::InvalidArgument(_) | BpqmError::BadOrder(_) => BpqmStatus::InvalidArgument,
        BpqmError::UnknownCode(_) => BpqmStatus::UnknownCode,
        BpqmError::NotTree => BpqmStatus::NotTree,
        BpqmError::BitOutOfRange { .. } => BpqmStatus::BitOutOfRange,
        BpqmError::Guard { .. } => BpqmStatus::Guard,
        BpqmError::Io(_) => BpqmStatus::Io,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guarded(f: impl FnOnce() -> Result<(), (BpqmStatus, String)>) -> BpqmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BpqmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BpqmStatus::Panic
        }
    }
}

fn lib<T>(r: bpqm::Result<T>) -> Result<T, (BpqmStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (BpqmStatus, String) {
    (BpqmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn code_ref<'a>(code: *const BpqmCode) -> Result<&'a BinaryLinearCode, (BpqmStatus, String)> {
    code.as_ref().map(|c| &c.inner).ok_or_else(|| null("code"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (BpqmStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (BpqmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (BpqmStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), (BpqmStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn thetas_for<'a>(
    code: &BinaryLinearCode,
    thetas: *const f64,
    len: usize,
) -> Result<&'a [f64], (BpqmStatus, String)> {
    let t = slice_arg(thetas, len, "thetas")?;
    if t.len() != code.n() {
        return Err((BpqmStatus::InvalidArgument, format!("{} angles for a length-{} code", t.len(), code.n())));
    }
    Ok(t)
}

unsafe fn emit_code(out: *mut *mut BpqmCode, code: BinaryLinearCode) -> Result<(), (BpqmStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(Box::into_raw(Box::new(BpqmCode { inner: code })));
    Ok(())
}

/// Create one of the built-in codes: `code5`, `code6`, `code8`, `code17`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpqm_code_builtin(name: *const c_char, out: *mut *mut BpqmCode) -> BpqmStatus {
    guarded(|| {
        let name = str_arg(name, "name")?;
        emit_code(out, lib(builtin_code(name))?)
    })
}

/// Load a code from a file path or a `builtin:<name>` source string.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpqm_code_load(source: *const c_char, out: *mut *mut BpqmCode) -> BpqmStatus {
    guarded(|| {
        let source = str_arg(source, "source")?;
        emit_code(out, lib(load_code(source))?)
    })
}

/// Create a code from a full-rank row-major parity-check matrix of 0/1 bytes.
///
/// # Safety
/// `h` must point to `rows * n` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bpqm_code_from_parity_check(
    h: *const u8,
    rows: usize,
    n: usize,
    out: *mut *mut BpqmCode,
) -> BpqmStatus {
    guarded(|| {
        let cells = rows.checked_mul(n).ok_or((BpqmStatus::InvalidArgument, "matrix size overflows".to_string()))?;
        let flat = slice_arg(h, cells, "h")?;
        let matrix: Vec<Vec<u8>> = flat.chunks(n.max(1)).map(<[u8]>::to_vec).collect();
        emit_code(out, lib(BinaryLinearCode::from_parity_check_with_n(&matrix, n))?)
    })
}

/// Release a code handle. Passing null is a no-op.
///
/// # Safety
/// `code` must be null or a handle returned by a `bpqm_code_*` constructor
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bpqm_code_free(code: *mut BpqmCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length n, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpqm_code_n(code: *const BpqmCode) -> usize {
    code.as_ref().map_or(0, |c| c.inner.n())
}

/// Dimension k, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpqm_code_k(code: *const BpqmCode) -> usize {
    code.as_ref().map_or(0, |c| c.inner.k())
}

/// BPQM success probability for bit `r` (1-based), averaged over codewords.
///
/// # Safety
/// `code` must be a live handle, `thetas` must point to `len` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bpqm_bit_success(
    code: *const BpqmCode,
    thetas: *const f64,
    len: usize,
    r: usize,
    out: *mut f64,
) -> BpqmStatus {
    guarded(|| {
        let code = code_ref(code)?;
        let t = thetas_for(code, thetas, len)?;
        write_out(out, lib(qsim::bpqm_bit_success(code, t, r))?)
    })
}

/// BPQM block success with sequential decoding in `order` (1-based
/// positions); pass `order_len = 0` for the default information set.
///
/// # Safety
/// As for [`bpqm_bit_success`]; `order` must point to `order_len` values.
#[no_mangle]
pub unsafe extern "C" fn bpqm_block_success(
    code: *const BpqmCode,
    thetas: *const f64,
    len: usize,
    order: *const usize,
    order_len: usize,
    out: *mut f64,
) -> BpqmStatus {
    guarded(|| {
        let code = code_ref(code)?;
        let t = thetas_for(code, thetas, len)?;
        let order = match slice_arg(order, order_len, "order")? {
            [] => default_order(code),
            o => o.to_vec(),
        };
        write_out(out, lib(bpqm_block_success_average(code, t, &order))?)
    })
}

/// Success of discretized message-passing decoding of bit `r` on codeword
/// `x` (`n` bytes of 0/1) with a `bits`-qubit angle register; `bits = 0`
/// disables quantization.
///
/// # Safety
/// As for [`bpqm_bit_success`]; `x` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bpqm_mp_bit_success(
    code: *const BpqmCode,
    thetas: *const f64,
    x: *const u8,
    len: usize,
    r: usize,
    bits: u32,
    out: *mut f64,
) -> BpqmStatus {
    guarded(|| {
        let code = code_ref(code)?;
        let t = thetas_for(code, thetas, len)?;
        let x = slice_arg(x, len, "x")?;
        let grid = if bits == 0 { QuantGrid::exact() } else { lib(QuantGrid::new(bits))? };
        write_out(out, lib(mp_bit_success(code, t, x, r, &grid))?)
    })
}

/// Optimal (Helstrom) success probability for bit `r`.
///
/// # Safety
/// As for [`bpqm_bit_success`].
#[no_mangle]
pub unsafe extern "C" fn bpqm_helstrom_bit_success(
    code: *const BpqmCode,
    thetas: *const f64,
    len: usize,
    r: usize,
    out: *mut f64,
) -> BpqmStatus {
    guarded(|| {
        let code = code_ref(code)?;
        let t = thetas_for(code, thetas, len)?;
        write_out(out, lib(helstrom_bit_success(code, t, r))?)
    })
}

/// Optimal (pretty-good-measurement) block success probability.
///
/// # Safety
/// As for [`bpqm_bit_success`].
#[no_mangle]
pub unsafe extern "C" fn bpqm_pgm_block_success(
    code: *const BpqmCode,
    thetas: *const f64,
    len: usize,
    out: *mut f64,
) -> BpqmStatus {
    guarded(|| {
        let code = code_ref(code)?;
        let t = thetas_for(code, thetas, len)?;
        write_out(out, lib(pgm_block_success(code, t))?)
    })
}

/// Success of measuring every output in the ± basis followed by classical
/// MAP decoding: of bit `r` when `r > 0`, of the whole codeword when `r = 0`.
///
/// # Safety
/// As for [`bpqm_bit_success`].
#[no_mangle]
pub unsafe extern "C" fn bpqm_classical_map_success(
    code: *const BpqmCode,
    thetas: *const f64,
    len: usize,
    r: usize,
    out: *mut f64,
) -> BpqmStatus {
    guarded(|| {
        let code = code_ref(code)?;
        let t = thetas_for(code, thetas, len)?;
        let target = if r == 0 { Target::Block } else { Target::Bit(r) };
        write_out(out, lib(classical_map_success(code, t, target))?)
    })
}

/// Success for bit `r` of BPQM on the depth-`h` computation tree with ENU
/// cloning, every channel at angle `theta`.
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bpqm_nontree_bit_success(
    code: *const BpqmCode,
    theta: f64,
    r: usize,
    h: usize,
    out: *mut f64,
) -> BpqmStatus {
    guarded(|| {
        let code = code_ref(code)?;
        write_out(out, lib(nontree_bit_success(code, theta, r, h, Cloner::Enu))?)
    })
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bpqm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bpqm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
