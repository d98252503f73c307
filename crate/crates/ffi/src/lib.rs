//! C ABI for the hahnlab kernel.
//!
//! A session wraps one field configuration (coefficient field, value group,
//! additive map, truncation bound). Commands mirror the CLI one-to-one and
//! return canonical JSON; status codes match the CLI exit codes. All strings
//! are UTF-8 and NUL-terminated; strings returned by this library must be
//! released with `hl_string_free`.

use hahnlab::cli::{dispatch, CommandOptions, OutputFormat, Session, SessionConfig};
use hahnlab::parse::{parse_coeff_field, parse_value_group};
use libc::{c_char, c_longlong, c_uint};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

/// Status of an ffi call; nonzero values mirror the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    /// Success.
    Ok = 0,
    /// Certified unsolvable; the JSON carries the certificate.
    Unsat = 1,
    /// Unknown or precision exhausted.
    Unknown = 2,
    /// Parse or configuration error.
    Invalid = 3,
    /// Unsupported field or value-group combination.
    Unsupported = 4,
    /// A required pointer argument was null or not valid UTF-8.
    BadPointer = 5,
}

/// Opaque session handle.
pub struct HlSession {
    session: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(cleaned).unwrap();
    });
}

fn status_from_exit(exit: i32) -> HlStatus {
    match exit {
        0 => HlStatus::Ok,
        1 => HlStatus::Unsat,
        2 => HlStatus::Unknown,
        4 => HlStatus::Unsupported,
        _ => HlStatus::Invalid,
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, HlStatus> {
    if p.is_null() {
        return Err(HlStatus::BadPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| HlStatus::BadPointer)
}

unsafe fn read_opt_str<'a>(p: *const c_char) -> Result<Option<&'a str>, HlStatus> {
    if p.is_null() {
        return Ok(None);
    }
    Ok(Some(read_str(p)?))
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Most recent error message on this thread; do not free. Empty when the
/// last call succeeded.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a session. `field` is "Q" or "Qx"; `group` is "Z", "Q", "Z/d" or
/// "Z^nlex"; `cmap` uses the CLI literal syntax ("0", "1 -> x",
/// "e1 -> 1, e2 -> 1/x"); `bound` is a group-element literal or null for the
/// default. Returns null on error (see `hl_last_error`).
///
/// # Safety
/// All non-null pointers must reference NUL-terminated UTF-8 strings valid
/// for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn hl_session_new(
    field: *const c_char,
    group: *const c_char,
    cmap: *const c_char,
    bound: *const c_char,
) -> *mut HlSession {
    let parts = (|| -> Result<SessionConfig, String> {
        let field = read_str(field).map_err(|_| "field pointer invalid".to_string())?;
        let group = read_str(group).map_err(|_| "group pointer invalid".to_string())?;
        let cmap = read_str(cmap).map_err(|_| "cmap pointer invalid".to_string())?;
        let bound = read_opt_str(bound).map_err(|_| "bound pointer invalid".to_string())?;
        Ok(SessionConfig {
            field: parse_coeff_field(field).map_err(|e| e.to_string())?,
            group: parse_value_group(group).map_err(|e| e.to_string())?,
            cmap_text: cmap.to_string(),
            bound_text: bound.map(|s| s.to_string()),
            format: OutputFormat::Json,
        })
    })();
    let config = match parts {
        Ok(c) => c,
        Err(msg) => {
            set_last_error(&msg);
            return ptr::null_mut();
        }
    };
    match config.build() {
        Ok(session) => {
            set_last_error("");
            Box::into_raw(Box::new(HlSession { session }))
        }
        Err(e) => {
            set_last_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Releases a session created by `hl_session_new`.
///
/// # Safety
/// `session` must be a pointer returned by `hl_session_new` that has not
/// already been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hl_session_free(session: *mut HlSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Runs one command against the session and stores a newly allocated JSON
/// string in `*json_out` (free with `hl_string_free`). Commands and status
/// codes mirror the CLI: eval, derive, dagger, valuation, residue, constant?,
/// solve-linear (arg1 = operator, arg2 = rhs), solve-dagger (arg1 = u,
/// `extra` = search bound), lift (arg1 = polynomial, `bound` = target),
/// nth-root (arg1 = series, `extra` = n, `bound` = target), kernel, classify,
/// purity (arg1 = generators), examples (arg1 = "run", arg2 = optional id).
///
/// # Safety
/// `session` must come from `hl_session_new`; string pointers must be valid
/// NUL-terminated UTF-8 or null where documented; `json_out` must be null or
/// point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_run(
    session: *const HlSession,
    command: *const c_char,
    arg1: *const c_char,
    arg2: *const c_char,
    bound: *const c_char,
    extra: c_longlong,
    json_out: *mut *mut c_char,
) -> HlStatus {
    if !json_out.is_null() {
        *json_out = ptr::null_mut();
    }
    if session.is_null() {
        set_last_error("session pointer is null");
        return HlStatus::BadPointer;
    }
    let command = match read_str(command) {
        Ok(c) => c,
        Err(s) => {
            set_last_error("command pointer invalid");
            return s;
        }
    };
    let arg1 = match read_opt_str(arg1) {
        Ok(a) => a,
        Err(s) => {
            set_last_error("arg1 pointer invalid");
            return s;
        }
    };
    let arg2 = match read_opt_str(arg2) {
        Ok(a) => a,
        Err(s) => {
            set_last_error("arg2 pointer invalid");
            return s;
        }
    };
    let bound = match read_opt_str(bound) {
        Ok(b) => b,
        Err(s) => {
            set_last_error("bound pointer invalid");
            return s;
        }
    };

    let mut args: Vec<String> = Vec::new();
    if let Some(a) = arg1 {
        args.push(a.to_string());
    }
    let mut opts = CommandOptions {
        lift_bound: bound.map(|b| b.to_string()),
        ..CommandOptions::default()
    };
    match command {
        "examples" => {
            if let Some(id) = arg2 {
                opts.only = Some(id.to_string());
            }
        }
        "solve-dagger" => {
            if extra > 0 {
                opts.search_bound = Some(extra as u64);
            }
        }
        "nth-root" => {
            if extra > 0 {
                opts.root_degree = Some(extra as c_uint);
            }
        }
        _ => {
            if let Some(a) = arg2 {
                args.push(a.to_string());
            }
        }
    }

    let outcome = dispatch(&(*session).session, command, &args, &opts);
    if outcome.exit == 0 {
        set_last_error("");
    } else {
        set_last_error(outcome.stdout.trim_end());
    }
    if !json_out.is_null() {
        let body = outcome.stdout.trim_end().to_string();
        let cleaned: String = body.chars().filter(|&c| c != '\0').collect();
        *json_out = CString::new(cleaned).unwrap().into_raw();
    }
    status_from_exit(outcome.exit)
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously stored by `hl_run` (or null).
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn new_session(field: &str, group: &str, cmap: &str) -> *mut HlSession {
        hl_session_new(
            cstr(field).as_ptr(),
            cstr(group).as_ptr(),
            cstr(cmap).as_ptr(),
            ptr::null(),
        )
    }

    unsafe fn run_simple(s: *mut HlSession, cmd: &str, arg: &str) -> (HlStatus, String) {
        let mut out: *mut c_char = ptr::null_mut();
        let st = hl_run(
            s,
            cstr(cmd).as_ptr(),
            cstr(arg).as_ptr(),
            ptr::null(),
            ptr::null(),
            0,
            &mut out,
        );
        let body = if out.is_null() {
            String::new()
        } else {
            let b = CStr::from_ptr(out).to_str().unwrap().to_string();
            hl_string_free(out);
            b
        };
        (st, body)
    }

    #[test]
    fn session_round_trip() {
        unsafe {
            let s = new_session("Qx", "Z", "1 -> 1");
            assert!(!s.is_null());
            let (st, body) = run_simple(s, "dagger", "t");
            assert_eq!(st, HlStatus::Ok);
            assert_eq!(body, "{\"status\":\"ok\",\"value\":\"1\"}");
            hl_session_free(s);
        }
    }

    #[test]
    fn unsat_status_propagates() {
        unsafe {
            let s = new_session("Qx", "Z", "1 -> x");
            let (st, body) = run_simple(s, "solve-dagger", "1");
            assert_eq!(st, HlStatus::Unsat);
            assert!(body.contains("\"status\":\"unsat\""));
            let err = CStr::from_ptr(hl_last_error()).to_str().unwrap();
            assert!(err.contains("unsat"));
            hl_session_free(s);
        }
    }

    #[test]
    fn bad_config_yields_null() {
        unsafe {
            let s = new_session("R", "Z", "0");
            assert!(s.is_null());
            let err = CStr::from_ptr(hl_last_error()).to_str().unwrap();
            assert!(err.contains("unknown coefficient field"));
        }
    }

    #[test]
    fn null_pointers_are_rejected() {
        unsafe {
            let mut out: *mut c_char = ptr::null_mut();
            let st = hl_run(
                ptr::null(),
                cstr("eval").as_ptr(),
                cstr("t").as_ptr(),
                ptr::null(),
                ptr::null(),
                0,
                &mut out,
            );
            assert_eq!(st, HlStatus::BadPointer);
            assert!(out.is_null());
        }
    }

    #[test]
    fn lift_with_bound_string() {
        unsafe {
            let s = new_session("Qx", "Z", "1 -> 0");
            let mut out: *mut c_char = ptr::null_mut();
            let st = hl_run(
                s,
                cstr("lift").as_ptr(),
                cstr("Y' + Y - 1 - t").as_ptr(),
                ptr::null(),
                cstr("10").as_ptr(),
                0,
                &mut out,
            );
            assert_eq!(st, HlStatus::Ok);
            let body = CStr::from_ptr(out).to_str().unwrap();
            assert!(body.contains("\"witness\":\"1 + t\""));
            hl_string_free(out);
            hl_session_free(s);
        }
    }

    #[test]
    fn examples_filtered_by_id() {
        unsafe {
            let s = new_session("Qx", "Z", "0");
            let mut out: *mut c_char = ptr::null_mut();
            let st = hl_run(
                s,
                cstr("examples").as_ptr(),
                cstr("run").as_ptr(),
                cstr("E2").as_ptr(),
                ptr::null(),
                0,
                &mut out,
            );
            assert_eq!(st, HlStatus::Ok);
            let body = CStr::from_ptr(out).to_str().unwrap();
            assert!(body.contains("\"id\":\"E2\""));
            assert!(body.contains("certificate"));
            hl_string_free(out);
            hl_session_free(s);
        }
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = hl_version();
        let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
        assert_eq!(s, env!("CARGO_PKG_VERSION"));
    }
}
