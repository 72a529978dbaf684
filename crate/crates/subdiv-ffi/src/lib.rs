//! C interface to `subdiv`.
//!
//! Every fallible function returns an `SD_*` status code and writes its
//! result through an out-pointer. A table is an opaque `SdTable` owned by the
//! caller and released with `sd_table_free`. Detail for the last failure on
//! the calling thread is available from `sd_last_error`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use subdiv::characterize::{characterize_1_2d, residue_rule, Verdict};
use subdiv::engine::{build_table, Boundary, GameSpec, SgTable};
use subdiv::Error;

pub const SD_OK: i32 = 0;
pub const SD_ERR_NULL: i32 = -1;
pub const SD_ERR_INVALID: i32 = -2;
pub const SD_ERR_OUT_OF_RANGE: i32 = -3;
pub const SD_ERR_PRECONDITION: i32 = -4;
pub const SD_ERR_INTERNAL: i32 = -5;
pub const SD_ERR_PANIC: i32 = -255;

pub const SD_VERDICT_ZERO: i32 = 0;
pub const SD_VERDICT_NONZERO: i32 = 1;
pub const SD_VERDICT_UNKNOWN: i32 = 2;

/// Boundary argument meaning "subtraction below 1 is not a move".
pub const SD_BOUNDARY_DISALLOWED: i32 = -1;

/// Opaque table of SG values for indices 1..=n_max.
pub struct SdTable {
    inner: SgTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Rejected(_) => SD_ERR_INVALID,
        Error::OutOfRange { .. } | Error::TableTooShort { .. } => SD_ERR_OUT_OF_RANGE,
        Error::Precondition(_) => SD_ERR_PRECONDITION,
        Error::Internal(_) => SD_ERR_INTERNAL,
    }
}

/// Runs `f`, turning library errors and panics into status codes.
fn guarded<F: FnOnce() -> Result<(), i32>>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SD_OK,
        Ok(Err(code)) => code,
        Err(_) => {
            set_last_error("panic inside subdiv".into());
            SD_ERR_PANIC
        }
    }
}

fn lib<T>(r: subdiv::Result<T>) -> Result<T, i32> {
    r.map_err(|e| {
        set_last_error(e.to_string());
        code_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), i32> {
    if p.is_null() {
        set_last_error(format!("{what} is null"));
        return Err(SD_ERR_NULL);
    }
    Ok(())
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Zero => SD_VERDICT_ZERO,
        Verdict::NonZero => SD_VERDICT_NONZERO,
        Verdict::Unknown => SD_VERDICT_UNKNOWN,
    }
}

/// Builds the table of G_{a,b} for 1..=n_max with the default boundary.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sd_table_build(a: u64, b: u64, n_max: u64, out: *mut *mut SdTable) -> i32 {
    sd_table_build_with(a, b, 1, std::ptr::null(), 0, n_max, out)
}

/// Builds a table with an explicit boundary and fixed leading values.
///
/// `boundary` is the phantom child value 0..=2, or `SD_BOUNDARY_DISALLOWED`.
/// `prefix[i]` fixes SG(i + 1); `prefix` may be null when `prefix_len` is 0.
///
/// # Safety
/// `prefix` must point to `prefix_len` readable bytes and `out` must be valid
/// for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sd_table_build_with(
    a: u64,
    b: u64,
    boundary: i32,
    prefix: *const u8,
    prefix_len: usize,
    n_max: u64,
    out: *mut *mut SdTable,
) -> i32 {
    guarded(|| {
        non_null(out, "out")?;
        if prefix_len > 0 {
            non_null(prefix, "prefix")?;
        }
        let boundary = match boundary {
            SD_BOUNDARY_DISALLOWED => Boundary::SubtractDisallowed,
            0..=2 => Boundary::VirtualValue(boundary as u8),
            other => {
                set_last_error(format!("boundary {other} is not -1, 0, 1 or 2"));
                return Err(SD_ERR_INVALID);
            }
        };
        let mut spec = lib(GameSpec::new(a, b))?.with_boundary(boundary);
        if prefix_len > 0 {
            let values = std::slice::from_raw_parts(prefix, prefix_len);
            let map: BTreeMap<u64, u8> = values.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v)).collect();
            spec = lib(spec.with_overrides(map))?;
        }
        let table = lib(build_table(&spec, n_max))?;
        *out = Box::into_raw(Box::new(SdTable { inner: table }));
        Ok(())
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must come from `sd_table_build*` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sd_table_free(table: *mut SdTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// # Safety
/// `table` must be a live table and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sd_table_len(table: *const SdTable, out: *mut u64) -> i32 {
    guarded(|| {
        non_null(table, "table")?;
        non_null(out, "out")?;
        *out = (*table).inner.n_max();
        Ok(())
    })
}

/// SG(n) for 1 <= n <= n_max.
///
/// # Safety
/// `table` must be a live table and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sd_table_get(table: *const SdTable, n: u64, out: *mut u8) -> i32 {
    guarded(|| {
        non_null(table, "table")?;
        non_null(out, "out")?;
        *out = lib(subdiv::engine::sg_value(&(*table).inner, n))?;
        Ok(())
    })
}

/// Copies up to `cap` values, SG(1) first, and stores the count in `written`.
///
/// # Safety
/// `buf` must be writable for `cap` bytes; `table` live; `written` writable.
#[no_mangle]
pub unsafe extern "C" fn sd_table_values(table: *const SdTable, buf: *mut u8, cap: usize, written: *mut usize) -> i32 {
    guarded(|| {
        non_null(table, "table")?;
        non_null(written, "written")?;
        let values = (*table).inner.values();
        let k = values.len().min(cap);
        if k > 0 {
            non_null(buf, "buf")?;
            std::ptr::copy_nonoverlapping(values.as_ptr(), buf, k);
        }
        *written = k;
        Ok(())
    })
}

/// Zero test for SG_{1,2d}(n) from the base-2d digits of n.
///
/// # Safety
/// `verdict` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sd_characterize_1_2d(n: u64, d: u64, verdict: *mut i32) -> i32 {
    guarded(|| {
        non_null(verdict, "verdict")?;
        if n == 0 || d == 0 || d > u64::MAX / 2 {
            set_last_error(format!("need n >= 1 and 1 <= d <= 2^63 - 1, got n = {n}, d = {d}"));
            return Err(SD_ERR_INVALID);
        }
        *verdict = verdict_code(characterize_1_2d(n, d).verdict);
        Ok(())
    })
}

/// Verdict from n mod 4d alone; may be `SD_VERDICT_UNKNOWN`.
///
/// # Safety
/// `verdict` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sd_residue_rule(n: u64, d: u64, verdict: *mut i32) -> i32 {
    guarded(|| {
        non_null(verdict, "verdict")?;
        if d == 0 || d > u64::MAX / 4 {
            set_last_error(format!("d = {d} out of range"));
            return Err(SD_ERR_INVALID);
        }
        *verdict = verdict_code(residue_rule(n, d).verdict);
        Ok(())
    })
}

/// Largest divisor of a coprime to b.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sd_coprime_part(a: u64, b: u64, out: *mut u64) -> i32 {
    guarded(|| {
        non_null(out, "out")?;
        if a == 0 || b < 2 {
            set_last_error(format!("need a >= 1 and b >= 2, got a = {a}, b = {b}"));
            return Err(SD_ERR_INVALID);
        }
        *out = subdiv::holding::coprime_part(a, b);
        Ok(())
    })
}

/// Value of SG_{1,2d}(n) reached through the reduction rules, and the number
/// of rules applied.
///
/// # Safety
/// `value` and `steps` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sd_reduce(n: u64, d: u64, value: *mut u8, steps: *mut u32) -> i32 {
    guarded(|| {
        non_null(value, "value")?;
        non_null(steps, "steps")?;
        let chain = lib(subdiv::reductions::reduce_to_base(n, d))?;
        *value = chain.value;
        *steps = chain.steps.len() as u32;
        Ok(())
    })
}

/// Runs the structural checks on the triple digraph with escape caps for
/// d = 1..=max_d. `passed` receives 1 or 0.
///
/// # Safety
/// `passed` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sd_blockgraph_verify(max_d: u64, passed: *mut i32) -> i32 {
    guarded(|| {
        non_null(passed, "passed")?;
        if max_d > 64 {
            set_last_error(format!("max_d = {max_d} is above 64"));
            return Err(SD_ERR_OUT_OF_RANGE);
        }
        *passed = i32::from(subdiv::blockgraph::verify(max_d).passed);
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sd_error_message(code: i32) -> *const c_char {
    let s: &'static [u8] = match code {
        SD_OK => b"ok\0",
        SD_ERR_NULL => b"null pointer argument\0",
        SD_ERR_INVALID => b"invalid argument\0",
        SD_ERR_OUT_OF_RANGE => b"index or size out of range\0",
        SD_ERR_PRECONDITION => b"precondition not met\0",
        SD_ERR_INTERNAL => b"internal error\0",
        SD_ERR_PANIC => b"panic caught at the C boundary\0",
        _ => b"unknown status code\0",
    };
    s.as_ptr().cast()
}

/// Copies the calling thread's last error detail into `buf` (nul-terminated,
/// truncated to `cap`). Returns the full length without the nul, or 0 when
/// there is none.
///
/// # Safety
/// `buf` must be writable for `cap` bytes or null with `cap` 0.
#[no_mangle]
pub unsafe extern "C" fn sd_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let k = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, k);
            *buf.add(k) = 0;
        }
        bytes.len()
    })
}

/// Library version, nul-terminated.
#[no_mangle]
pub extern "C" fn sd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
