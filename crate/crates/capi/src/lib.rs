//! C ABI for the ccl library.
//!
//! Objects cross the boundary as opaque handles; every fallible call
//! returns a `CclStatus` and leaves a thread-local message retrievable
//! with `ccl_last_error_message`.  Strings returned through out-pointers
//! are owned by the library and must be released with `ccl_string_free`.

use ccl_core::crystal::Crystal;
use ccl_core::error::Error;
use ccl_core::involution;
use ccl_core::rootdata::{build_root_system, RootSystem, Weight};
use ccl_core::verify::Outcome;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

/// Status codes mirroring the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CclStatus {
    Ok = 0,
    Mismatch = 1,
    Inconclusive = 2,
    InvalidArgument = 3,
    Internal = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> CclStatus {
    match err {
        Error::SimpleSpectrumViolation { .. }
        | Error::FidelityFailure { .. }
        | Error::StepCollapse { .. }
        | Error::ResidualTooLarge { .. } => CclStatus::Inconclusive,
        _ => CclStatus::InvalidArgument,
    }
}

/// Message for the most recent failure on this thread.  The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ccl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static version string.
#[no_mangle]
pub extern "C" fn ccl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string returned through an out-pointer.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ccl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque root-system handle.
pub struct CclRootSystem(RootSystem);

/// Opaque crystal handle.
pub struct CclCrystal(Crystal);

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, CclStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(CclStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CclStatus::InvalidArgument
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> CclStatus {
    if out.is_null() {
        set_error("null out-pointer");
        return CclStatus::InvalidArgument;
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CclStatus::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL");
            CclStatus::Internal
        }
    }
}

/// Build a root system from a Dynkin type label such as "A2".
///
/// # Safety
/// `label` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccl_root_system_new(
    label: *const c_char,
    out: *mut *mut CclRootSystem,
) -> CclStatus {
    let label = match cstr(label) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if out.is_null() {
        set_error("null out-pointer");
        return CclStatus::InvalidArgument;
    }
    match build_root_system(label) {
        Ok(rs) => {
            *out = Box::into_raw(Box::new(CclRootSystem(rs)));
            CclStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            *out = ptr::null_mut();
            status_of(&e)
        }
    }
}

/// # Safety
/// `rs` must come from `ccl_root_system_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ccl_root_system_free(rs: *mut CclRootSystem) {
    if !rs.is_null() {
        drop(Box::from_raw(rs));
    }
}

/// Rank, or 0 for a null handle.
///
/// # Safety
/// `rs` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ccl_root_system_rank(rs: *const CclRootSystem) -> usize {
    rs.as_ref().map_or(0, |r| r.0.rank())
}

/// JSON datum `{"type":...,"rank":...,"cartan":[...]}`.
///
/// # Safety
/// `rs` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccl_root_system_json(
    rs: *const CclRootSystem,
    out: *mut *mut c_char,
) -> CclStatus {
    let Some(rs) = rs.as_ref() else {
        set_error("null root system");
        return CclStatus::InvalidArgument;
    };
    give_string(rs.0.to_json().to_string(), out)
}

/// Build the crystal B(lambda); `coords` has one entry per node.
///
/// # Safety
/// `rs` must be live; `coords` must point to `len` integers; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_crystal_new(
    rs: *const CclRootSystem,
    coords: *const i64,
    len: usize,
    out: *mut *mut CclCrystal,
) -> CclStatus {
    let Some(rs) = rs.as_ref() else {
        set_error("null root system");
        return CclStatus::InvalidArgument;
    };
    if coords.is_null() || out.is_null() || len != rs.0.rank() {
        set_error("coords must hold exactly rank entries");
        return CclStatus::InvalidArgument;
    }
    let slice = std::slice::from_raw_parts(coords, len);
    match Crystal::generate(&rs.0, &Weight::from_ints(slice)) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(CclCrystal(c)));
            CclStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            *out = ptr::null_mut();
            status_of(&e)
        }
    }
}

/// # Safety
/// `c` must come from a ccl constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ccl_crystal_free(c: *mut CclCrystal) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ccl_crystal_len(c: *const CclCrystal) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// Tensor product of two crystals over the same root system.
///
/// # Safety
/// `a`, `b` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccl_crystal_tensor(
    a: *const CclCrystal,
    b: *const CclCrystal,
    out: *mut *mut CclCrystal,
) -> CclStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        set_error("null crystal");
        return CclStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("null out-pointer");
        return CclStatus::InvalidArgument;
    }
    match Crystal::tensor(&a.0, &b.0) {
        Ok(t) => {
            *out = Box::into_raw(Box::new(CclCrystal(t)));
            CclStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            *out = ptr::null_mut();
            status_of(&e)
        }
    }
}

/// The crystal graph as JSON `{"elements":[...],"edges":[...]}`.
///
/// # Safety
/// `c` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_crystal_json(
    c: *const CclCrystal,
    out: *mut *mut c_char,
) -> CclStatus {
    let Some(c) = c.as_ref() else {
        set_error("null crystal");
        return CclStatus::InvalidArgument;
    };
    give_string(c.0.to_json().to_string(), out)
}

/// The crystal graph in DOT format.
///
/// # Safety
/// `c` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_crystal_dot(
    c: *const CclCrystal,
    out: *mut *mut c_char,
) -> CclStatus {
    let Some(c) = c.as_ref() else {
        set_error("null crystal");
        return CclStatus::InvalidArgument;
    };
    give_string(c.0.to_dot(), out)
}

/// Schützenberger involution as a permutation written into `perm`
/// (caller-allocated, `len` = number of elements).  Pass `nodes = NULL`
/// for the full diagram or a list of 0-based node indices for xi_J.
///
/// # Safety
/// `c` live; `perm` must point to `len` writable entries; `nodes` must
/// point to `n_nodes` entries when non-null.
#[no_mangle]
pub unsafe extern "C" fn ccl_schutzenberger(
    c: *const CclCrystal,
    nodes: *const usize,
    n_nodes: usize,
    perm: *mut usize,
    len: usize,
) -> CclStatus {
    let Some(c) = c.as_ref() else {
        set_error("null crystal");
        return CclStatus::InvalidArgument;
    };
    if perm.is_null() || len != c.0.len() {
        set_error("perm must hold exactly crystal-length entries");
        return CclStatus::InvalidArgument;
    }
    let result = if nodes.is_null() {
        involution::schutzenberger(&c.0)
    } else {
        let subset = std::slice::from_raw_parts(nodes, n_nodes);
        involution::partial_schutzenberger(&c.0, subset)
    };
    match result {
        Ok(xi) => {
            let out = std::slice::from_raw_parts_mut(perm, len);
            out.copy_from_slice(&xi.perm);
            CclStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Run one verification case from a JSON configuration (same schema as
/// `ccl verify case --config`).  The status reports the verdict: Ok for
/// equal, Mismatch, or Inconclusive; the full report lands in `out`.
///
/// # Safety
/// `config_json` must be NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_verify_case(
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> CclStatus {
    let text = match cstr(config_json) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match ccl_core::cli::run_case_from_json(text) {
        Ok(report) => {
            let payload = report.to_json().to_string();
            let st = match report.outcome {
                Outcome::Equal => CclStatus::Ok,
                Outcome::Mismatch => {
                    set_error("crystal and monodromy permutations differ");
                    CclStatus::Mismatch
                }
                Outcome::Inconclusive => {
                    set_error(&report.detail);
                    CclStatus::Inconclusive
                }
            };
            let give = give_string(payload, out);
            if give != CclStatus::Ok {
                return give;
            }
            st
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn root_system_lifecycle() {
        unsafe {
            let label = CString::new("A2").unwrap();
            let mut rs: *mut CclRootSystem = ptr::null_mut();
            assert_eq!(ccl_root_system_new(label.as_ptr(), &mut rs), CclStatus::Ok);
            assert_eq!(ccl_root_system_rank(rs), 2);
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(ccl_root_system_json(rs, &mut json), CclStatus::Ok);
            let s = CStr::from_ptr(json).to_str().unwrap().to_string();
            assert_eq!(
                s,
                "{\"type\":\"A2\",\"rank\":2,\"cartan\":[[2,-1],[-1,2]]}"
            );
            ccl_string_free(json);
            ccl_root_system_free(rs);
        }
    }

    #[test]
    fn unknown_type_reports_error() {
        unsafe {
            let label = CString::new("Z9").unwrap();
            let mut rs: *mut CclRootSystem = ptr::null_mut();
            assert_eq!(
                ccl_root_system_new(label.as_ptr(), &mut rs),
                CclStatus::InvalidArgument
            );
            assert!(rs.is_null());
            let msg = CStr::from_ptr(ccl_last_error_message()).to_str().unwrap();
            assert!(msg.contains("Z9"));
        }
    }

    #[test]
    fn crystal_and_involution() {
        unsafe {
            let label = CString::new("A1").unwrap();
            let mut rs: *mut CclRootSystem = ptr::null_mut();
            ccl_root_system_new(label.as_ptr(), &mut rs);
            let coords = [2i64];
            let mut c: *mut CclCrystal = ptr::null_mut();
            assert_eq!(
                ccl_crystal_new(rs, coords.as_ptr(), 1, &mut c),
                CclStatus::Ok
            );
            assert_eq!(ccl_crystal_len(c), 3);
            let mut perm = [0usize; 3];
            assert_eq!(
                ccl_schutzenberger(c, ptr::null(), 0, perm.as_mut_ptr(), 3),
                CclStatus::Ok
            );
            assert_eq!(perm, [2, 1, 0]);
            // tensor and JSON
            let mut t: *mut CclCrystal = ptr::null_mut();
            assert_eq!(ccl_crystal_tensor(c, c, &mut t), CclStatus::Ok);
            assert_eq!(ccl_crystal_len(t), 9);
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(ccl_crystal_json(t, &mut json), CclStatus::Ok);
            assert!(CStr::from_ptr(json).to_str().unwrap().starts_with("{\"elements\""));
            ccl_string_free(json);
            ccl_crystal_free(t);
            ccl_crystal_free(c);
            ccl_root_system_free(rs);
        }
    }

    #[test]
    fn verify_case_roundtrip() {
        unsafe {
            let cfg = CString::new(
                "{\"kind\":\"internal\",\"algebra\":\"sl2\",\"lambda\":[2],\
                 \"generator\":\"sI\",\"seed\":7}",
            )
            .unwrap();
            let mut out: *mut c_char = ptr::null_mut();
            let st = ccl_verify_case(cfg.as_ptr(), &mut out);
            assert_eq!(st, CclStatus::Ok);
            let s = CStr::from_ptr(out).to_str().unwrap();
            assert!(s.contains("\"outcome\":\"equal\""));
            ccl_string_free(out);
        }
    }
}
