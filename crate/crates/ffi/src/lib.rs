//! C ABI for the joint LP decoder.
//!
//! Objects are opaque handles created by `*_new`/`*_from_*` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`JdlpStatus`]; on failure [`jdlp_last_error_message`] describes the
//! error for the calling thread. Output pointers are written only on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use jdlp::channel::snr_db_to_sigma;
use jdlp::code::{gen_regular_code, read_alist, write_alist};
use jdlp::jimpd::{jimpd_decode, IterSchedule};
use jdlp::pcw::q_function;
use jdlp::{ChannelModel, Error, ErrorCategory, JointDecoder, OutcomeKind, ParityCheckCode, Trellis};

/// Result of a C API call. Error values match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JdlpStatus {
    Ok = 0,
    Usage = 2,
    Input = 3,
    Io = 4,
    Solver = 5,
    Analysis = 6,
    NullPointer = 7,
    Panic = 8,
}

impl From<ErrorCategory> for JdlpStatus {
    fn from(c: ErrorCategory) -> Self {
        match c {
            ErrorCategory::Usage => JdlpStatus::Usage,
            ErrorCategory::Input => JdlpStatus::Input,
            ErrorCategory::Io => JdlpStatus::Io,
            ErrorCategory::Solver => JdlpStatus::Solver,
            ErrorCategory::Analysis => JdlpStatus::Analysis,
        }
    }
}

/// Finite-state channel.
pub struct JdlpChannel(ChannelModel);

/// Binary parity-check code.
pub struct JdlpCode(ParityCheckCode);

/// Joint LP decoder bound to one channel and code.
pub struct JdlpDecoder(JointDecoder);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JdlpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JdlpStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            e.category().into()
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            JdlpStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            JdlpStatus::Panic
        }
    }
}

unsafe fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn string_arg(p: *const c_char, what: &'static str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::Lib(Error::InvalidArgument(format!("{what} is not UTF-8"))))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(p: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

/// Message of the last failed call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn jdlp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a channel from a built-in name (`dic`, `pdic`, optionally with a
/// `-uniform` suffix) or a channel file path.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_channel_from_spec(spec: *const c_char, out: *mut *mut JdlpChannel) -> JdlpStatus {
    guard(|| {
        let ch = ChannelModel::from_name_or_path(&string_arg(spec, "spec")?)?;
        write_out(out, Box::into_raw(Box::new(JdlpChannel(ch))), "out")
    })
}

/// Parses a channel description given as text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_channel_parse(text: *const c_char, out: *mut *mut JdlpChannel) -> JdlpStatus {
    guard(|| {
        let ch = ChannelModel::parse(&string_arg(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(JdlpChannel(ch))), "out")
    })
}

/// # Safety
/// `channel` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jdlp_channel_free(channel: *mut JdlpChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Noise standard deviation for an SNR (output power over noise variance) in dB.
///
/// # Safety
/// `channel` must be a live handle; `sigma` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_snr_db_to_sigma(channel: *const JdlpChannel, snr_db: f64, sigma: *mut f64) -> JdlpStatus {
    guard(|| {
        let ch = nonnull(channel, "channel")?;
        write_out(sigma, snr_db_to_sigma(snr_db, &ch.0), "sigma")
    })
}

/// Reads a code from alist text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_code_from_alist(text: *const c_char, out: *mut *mut JdlpCode) -> JdlpStatus {
    guard(|| {
        let code = read_alist(&string_arg(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(JdlpCode(code))), "out")
    })
}

/// Generates a (dv, dc)-regular code without double edges or 4-cycles.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_code_generate(
    n: usize,
    dv: usize,
    dc: usize,
    seed: u64,
    out: *mut *mut JdlpCode,
) -> JdlpStatus {
    guard(|| {
        let code = gen_regular_code(n, dv, dc, seed)?;
        write_out(out, Box::into_raw(Box::new(JdlpCode(code))), "out")
    })
}

/// Single parity-check code of length `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_code_single_parity_check(n: usize, out: *mut *mut JdlpCode) -> JdlpStatus {
    guard(|| {
        let code = ParityCheckCode::single_parity_check(n)?;
        write_out(out, Box::into_raw(Box::new(JdlpCode(code))), "out")
    })
}

/// Block length of a code.
///
/// # Safety
/// `code` must be a live handle; `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_code_length(code: *const JdlpCode, n: *mut usize) -> JdlpStatus {
    guard(|| write_out(n, nonnull(code, "code")?.0.len(), "n"))
}

/// Serializes a code as alist text. Release the string with
/// [`jdlp_string_free`].
///
/// # Safety
/// `code` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_code_to_alist(code: *const JdlpCode, out: *mut *mut c_char) -> JdlpStatus {
    guard(|| {
        let text = write_alist(&nonnull(code, "code")?.0);
        let c = CString::new(text).map_err(|e| Failure::Lib(Error::InvalidArgument(e.to_string())))?;
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `code` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jdlp_code_free(code: *mut JdlpCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jdlp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the joint LP decoder for a channel and code. The handles may be
/// freed afterwards.
///
/// # Safety
/// `channel` and `code` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jdlp_decoder_new(
    channel: *const JdlpChannel,
    code: *const JdlpCode,
    out: *mut *mut JdlpDecoder,
) -> JdlpStatus {
    guard(|| {
        let ch = nonnull(channel, "channel")?;
        let code = nonnull(code, "code")?;
        let trellis = Trellis::build(&ch.0, code.0.len())?;
        let dec = JointDecoder::new(trellis, code.0.clone())?;
        write_out(out, Box::into_raw(Box::new(JdlpDecoder(dec))), "out")
    })
}

/// # Safety
/// `decoder` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jdlp_decoder_free(decoder: *mut JdlpDecoder) {
    if !decoder.is_null() {
        drop(Box::from_raw(decoder));
    }
}

/// LP joint decoding of `y` (length `len`, equal to the block length).
///
/// Writes the bit projection of the optimal flow to `bits` (`len` values),
/// `1` to `is_codeword` for an integral (codeword) output and `0` for a
/// pseudo-codeword, and the optimal cost to `objective`.
///
/// # Safety
/// `y` and `bits` must hold `len` doubles; the other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jdlp_decoder_decode(
    decoder: *const JdlpDecoder,
    y: *const f64,
    len: usize,
    sigma: f64,
    bits: *mut f64,
    is_codeword: *mut i32,
    objective: *mut f64,
) -> JdlpStatus {
    guard(|| {
        let dec = nonnull(decoder, "decoder")?;
        let y = slice_arg(y, len, "y")?;
        if bits.is_null() || is_codeword.is_null() || objective.is_null() {
            return Err(Failure::Null("output"));
        }
        let out = dec.0.decode(y, sigma)?;
        std::slice::from_raw_parts_mut(bits, len).copy_from_slice(&out.bits);
        *is_codeword = (out.kind == OutcomeKind::Codeword) as i32;
        *objective = out.objective;
        Ok(())
    })
}

/// Turbo-equalization baseline: `outer_iters` rounds of forward-backward
/// detection and `inner_bp_iters` sum-product iterations, stopping on a
/// valid codeword. Writes hard decisions to `bits` and `1` to `valid` when
/// they satisfy every check.
///
/// # Safety
/// `y` and `bits` must hold `len` elements; the other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jdlp_jimpd_decode(
    decoder: *const JdlpDecoder,
    y: *const f64,
    len: usize,
    sigma: f64,
    outer_iters: usize,
    inner_bp_iters: usize,
    bits: *mut u8,
    valid: *mut i32,
) -> JdlpStatus {
    guard(|| {
        let dec = nonnull(decoder, "decoder")?;
        let y = slice_arg(y, len, "y")?;
        if bits.is_null() || valid.is_null() {
            return Err(Failure::Null("output"));
        }
        let schedule = IterSchedule { outer_iters, inner_bp_iters, stop_on_valid: true };
        let out = jimpd_decode(dec.0.trellis(), dec.0.code(), y, sigma, &schedule)?;
        std::slice::from_raw_parts_mut(bits, len).copy_from_slice(&out.bits);
        *valid = out.valid as i32;
        Ok(())
    })
}

/// Gaussian tail probability Q(x).
#[no_mangle]
pub extern "C" fn jdlp_q_function(x: f64) -> f64 {
    q_function(x)
}
