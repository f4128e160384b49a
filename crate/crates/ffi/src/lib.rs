//! C ABI for the baseline-wander removal library: opaque handles, status
//! codes, and a thread-local last-error message. The header is generated
//! into `include/blwbench.h` at build time.
//!
//! Conventions:
//! - Every fallible call returns a [`BlwStatus`]; `BLW_STATUS_OK` is 0.
//! - Output handles are written through `out` pointers and must be released
//!   with the matching `*_free` function.
//! - On failure, `blw_last_error_message()` returns a UTF-8 description
//!   valid until the next failing call on the same thread.

use blwbench::denoise::{denoise, Method, MethodConfig};
use blwbench::error::Error;
use blwbench::generators::{contaminate, ContaminationSpec};
use blwbench::ingest::{read_csv, read_wfdb};
use blwbench::metrics::{mad, prd, ssd};
use blwbench::qrs::{detect_r_peaks, BeatAnnotations};
use blwbench::signal::{resample, Signal};
use libc::{c_char, c_double, size_t};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::path::Path;
use std::str::FromStr;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlwStatus {
    Ok = 0,
    /// A pointer argument was null.
    NullPointer = 1,
    /// Invalid argument or configuration value.
    InvalidArgument = 2,
    /// A file could not be parsed.
    Parse = 3,
    /// I/O failure.
    Io = 4,
    /// Numerical failure inside a method.
    Numeric = 5,
    /// Unsupported format or method.
    Unsupported = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(err: &Error) -> BlwStatus {
    match err {
        Error::Parse { .. } | Error::Json(_) => BlwStatus::Parse,
        Error::Io(_) => BlwStatus::Io,
        Error::UnsupportedFormat(_) | Error::UnknownMethod { .. } => BlwStatus::Unsupported,
        Error::UnstableFilter
        | Error::RankDeficient(_)
        | Error::Decomposition(_)
        | Error::ZeroVariance => BlwStatus::Numeric,
        _ => BlwStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> BlwStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Opaque signal handle.
pub struct BlwSignal(Signal);

/// Opaque beat-annotation handle.
pub struct BlwAnnotations(BeatAnnotations);

/// Opaque method-configuration handle.
pub struct BlwConfig(MethodConfig);

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn blw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> BlwStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return BlwStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    BlwStatus::Ok
}

macro_rules! deref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(v) => v,
            None => {
                set_error(concat!(stringify!($ptr), " is null"));
                return BlwStatus::NullPointer;
            }
        }
    };
}

fn utf8<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, BlwStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} is null"));
        return Err(BlwStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        BlwStatus::InvalidArgument
    })
}

/// Wrap a sample buffer into a signal handle.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be a valid
/// destination pointer.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_create(
    samples: *const c_double,
    len: size_t,
    fs: c_double,
    out: *mut *mut BlwSignal,
) -> BlwStatus {
    if samples.is_null() {
        set_error("samples is null");
        return BlwStatus::NullPointer;
    }
    let data = unsafe { std::slice::from_raw_parts(samples, len) }.to_vec();
    match Signal::new(data, fs, "ffi") {
        Ok(signal) => unsafe { write_out(out, BlwSignal(signal)) },
        Err(e) => fail(e),
    }
}

/// Release a signal handle. A null pointer is a no-op.
///
/// # Safety
/// `signal` must have been produced by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_free(signal: *mut BlwSignal) {
    if !signal.is_null() {
        drop(unsafe { Box::from_raw(signal) });
    }
}

/// Number of samples in the signal; 0 for a null handle.
///
/// # Safety
/// `signal` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_len(signal: *const BlwSignal) -> size_t {
    unsafe { signal.as_ref() }.map_or(0, |s| s.0.len())
}

/// Sampling rate in Hz; 0 for a null handle.
///
/// # Safety
/// `signal` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_fs(signal: *const BlwSignal) -> c_double {
    unsafe { signal.as_ref() }.map_or(0.0, |s| s.0.fs())
}

/// Copy the samples into a caller-provided buffer of `cap` doubles.
///
/// # Safety
/// `buffer` must point to at least `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_copy_samples(
    signal: *const BlwSignal,
    buffer: *mut c_double,
    cap: size_t,
) -> BlwStatus {
    let signal = deref!(signal);
    if buffer.is_null() {
        set_error("buffer is null");
        return BlwStatus::NullPointer;
    }
    if cap < signal.0.len() {
        set_error(&format!(
            "buffer of {cap} samples too small for signal of {}",
            signal.0.len()
        ));
        return BlwStatus::InvalidArgument;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(signal.0.samples().as_ptr(), buffer, signal.0.len());
    }
    BlwStatus::Ok
}

/// Read a one-amplitude-per-line CSV file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_read_csv(
    path: *const c_char,
    fs: c_double,
    out: *mut *mut BlwSignal,
) -> BlwStatus {
    let path = match utf8(path, "path") {
        Ok(p) => p,
        Err(s) => return s,
    };
    match read_csv(Path::new(path), fs) {
        Ok(signal) => unsafe { write_out(out, BlwSignal(signal)) },
        Err(e) => fail(e),
    }
}

/// Read one channel of a WFDB-style record (formats 212 and 16).
///
/// # Safety
/// `header_path` must be a valid NUL-terminated string; `out` a valid
/// destination.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_read_wfdb(
    header_path: *const c_char,
    channel: size_t,
    out: *mut *mut BlwSignal,
) -> BlwStatus {
    let path = match utf8(header_path, "header_path") {
        Ok(p) => p,
        Err(s) => return s,
    };
    match read_wfdb(Path::new(path), channel) {
        Ok(signal) => unsafe { write_out(out, BlwSignal(signal)) },
        Err(e) => fail(e),
    }
}

/// Resample to `target_fs` Hz (polyphase, 40 dB anti-alias stopband).
///
/// # Safety
/// `signal` must be a live handle; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn blw_signal_resample(
    signal: *const BlwSignal,
    target_fs: c_double,
    out: *mut *mut BlwSignal,
) -> BlwStatus {
    let signal = deref!(signal);
    match resample(&signal.0, target_fs) {
        Ok(s) => unsafe { write_out(out, BlwSignal(s)) },
        Err(e) => fail(e),
    }
}

/// Fresh configuration with the documented defaults (0.67 Hz cutoff etc.).
///
/// # Safety
/// `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn blw_config_default(out: *mut *mut BlwConfig) -> BlwStatus {
    unsafe { write_out(out, BlwConfig(MethodConfig::default())) }
}

/// Release a configuration handle. A null pointer is a no-op.
///
/// # Safety
/// `config` must have been produced by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blw_config_free(config: *mut BlwConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Set one configuration key from its text form, e.g.
/// `blw_config_set(cfg, "cutoff_hz", "0.67")`. Unknown keys are rejected.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` valid NUL-terminated
/// strings.
#[no_mangle]
pub unsafe extern "C" fn blw_config_set(
    config: *mut BlwConfig,
    key: *const c_char,
    value: *const c_char,
) -> BlwStatus {
    let config = match unsafe { config.as_mut() } {
        Some(c) => c,
        None => {
            set_error("config is null");
            return BlwStatus::NullPointer;
        }
    };
    let key = match utf8(key, "key") {
        Ok(k) => k,
        Err(s) => return s,
    };
    let value = match utf8(value, "value") {
        Ok(v) => v,
        Err(s) => return s,
    };
    match config.0.set(key, value) {
        Ok(()) => BlwStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Detect R peaks (derivative-square-integrate with a 5-15 Hz front end).
///
/// # Safety
/// `signal` must be a live handle; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn blw_detect_r_peaks(
    signal: *const BlwSignal,
    out: *mut *mut BlwAnnotations,
) -> BlwStatus {
    let signal = deref!(signal);
    match detect_r_peaks(&signal.0) {
        Ok(ann) => unsafe { write_out(out, BlwAnnotations(ann)) },
        Err(e) => fail(e),
    }
}

/// Wrap caller-provided ascending R-peak sample indices.
///
/// # Safety
/// `peaks` must point to `len` readable size_t values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn blw_annotations_create(
    peaks: *const size_t,
    len: size_t,
    fs: c_double,
    out: *mut *mut BlwAnnotations,
) -> BlwStatus {
    if peaks.is_null() {
        set_error("peaks is null");
        return BlwStatus::NullPointer;
    }
    let indices = unsafe { std::slice::from_raw_parts(peaks, len) }.to_vec();
    match BeatAnnotations::new(indices, fs) {
        Ok(ann) => unsafe { write_out(out, BlwAnnotations(ann)) },
        Err(e) => fail(e),
    }
}

/// Release an annotation handle. A null pointer is a no-op.
///
/// # Safety
/// `ann` must have been produced by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blw_annotations_free(ann: *mut BlwAnnotations) {
    if !ann.is_null() {
        drop(unsafe { Box::from_raw(ann) });
    }
}

/// Number of annotated beats; 0 for a null handle.
///
/// # Safety
/// `ann` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn blw_annotations_len(ann: *const BlwAnnotations) -> size_t {
    unsafe { ann.as_ref() }.map_or(0, |a| a.0.len())
}

/// Copy the R-peak sample indices into a buffer of `cap` entries.
///
/// # Safety
/// `buffer` must point to at least `cap` writable size_t values.
#[no_mangle]
pub unsafe extern "C" fn blw_annotations_copy(
    ann: *const BlwAnnotations,
    buffer: *mut size_t,
    cap: size_t,
) -> BlwStatus {
    let ann = deref!(ann);
    if buffer.is_null() {
        set_error("buffer is null");
        return BlwStatus::NullPointer;
    }
    if cap < ann.0.len() {
        set_error(&format!(
            "buffer of {cap} entries too small for {} beats",
            ann.0.len()
        ));
        return BlwStatus::InvalidArgument;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(ann.0.r_peaks().as_ptr(), buffer, ann.0.len());
    }
    BlwStatus::Ok
}

/// Run one removal method. `method` is one of: splines, fir, iir, af, maf,
/// ica, issm, emd, wt (plus the `identity` debug pass-through). `config`
/// may be null for defaults; `annotations` may be null unless the method
/// requires beats (splines, af, issm).
///
/// # Safety
/// All handles must be live or null as documented; `method` must be a
/// valid NUL-terminated string and `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn blw_denoise(
    method: *const c_char,
    signal: *const BlwSignal,
    config: *const BlwConfig,
    annotations: *const BlwAnnotations,
    out: *mut *mut BlwSignal,
) -> BlwStatus {
    let signal = deref!(signal);
    let method = match utf8(method, "method") {
        Ok(m) => m,
        Err(s) => return s,
    };
    let method = match Method::from_str(method) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let default_config = MethodConfig::default();
    let cfg = unsafe { config.as_ref() }.map_or(&default_config, |c| &c.0);
    let ann = unsafe { annotations.as_ref() }.map(|a| &a.0);
    match denoise(method, &signal.0, cfg, ann) {
        Ok(s) => unsafe { write_out(out, BlwSignal(s)) },
        Err(e) => fail(e),
    }
}

/// Mix `noise` into `clean`, scaled so MAD(noisy, clean) equals
/// `target_mad` exactly; the scale factor is written to `scale_out` when
/// non-null.
///
/// # Safety
/// `clean` and `noise` must be live handles; `out` a valid destination;
/// `scale_out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn blw_contaminate(
    clean: *const BlwSignal,
    noise: *const BlwSignal,
    target_mad: c_double,
    out: *mut *mut BlwSignal,
    scale_out: *mut c_double,
) -> BlwStatus {
    let clean = deref!(clean);
    let noise = deref!(noise);
    let spec = ContaminationSpec {
        target_mad,
        sine_freq: None,
    };
    match contaminate(&clean.0, &noise.0, &spec) {
        Ok((noisy, scale)) => {
            if !scale_out.is_null() {
                unsafe { *scale_out = scale };
            }
            unsafe { write_out(out, BlwSignal(noisy)) }
        }
        Err(e) => fail(e),
    }
}

unsafe fn metric_into(
    s1: *const BlwSignal,
    s2: *const BlwSignal,
    out: *mut c_double,
    metric: fn(&Signal, &Signal) -> Result<f64, Error>,
) -> BlwStatus {
    let s1 = deref!(s1);
    let s2 = deref!(s2);
    if out.is_null() {
        set_error("out is null");
        return BlwStatus::NullPointer;
    }
    match metric(&s1.0, &s2.0) {
        Ok(v) => {
            unsafe { *out = v };
            BlwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Absolute maximum distance between two compatible signals.
///
/// # Safety
/// `s1` and `s2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blw_metric_mad(
    s1: *const BlwSignal,
    s2: *const BlwSignal,
    out: *mut c_double,
) -> BlwStatus {
    unsafe { metric_into(s1, s2, out, mad) }
}

/// Sum of squared distances between two compatible signals.
///
/// # Safety
/// `s1` and `s2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blw_metric_ssd(
    s1: *const BlwSignal,
    s2: *const BlwSignal,
    out: *mut c_double,
) -> BlwStatus {
    unsafe { metric_into(s1, s2, out, ssd) }
}

/// Percentage RMS difference; `s1` is the reference.
///
/// # Safety
/// `s1` and `s2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blw_metric_prd(
    s1: *const BlwSignal,
    s2: *const BlwSignal,
    out: *mut c_double,
) -> BlwStatus {
    unsafe { metric_into(s1, s2, out, prd) }
}
