//! C ABI over the `mlt` tokenizer.
//!
//! A tokenizer lives behind an opaque `MltTokenizer*` created by
//! [`mlt_fit`], [`mlt_load`] or [`mlt_from_json`] and released with
//! [`mlt_free`]. Handles are immutable, so one handle may be shared across
//! threads without locking.
//!
//! Every fallible call returns an [`MltStatus`]. On failure a message is
//! kept per thread and can be read with [`mlt_last_error`] until the next
//! failing call on that thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use mlt::{Error, ErrorKind, Strategy, TokenVector, TokenizerConfig};

/// Opaque tokenizer handle.
pub struct MltTokenizer {
    cfg: TokenizerConfig,
}

/// Result code of every fallible call. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MltStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    Overflow = 4,
    ModulusMismatch = 5,
    NotInvertible = 6,
    IdOutOfRange = 7,
    DigitOutOfRange = 8,
    DimensionMismatch = 9,
    SingularMatrix = 10,
    GenerationFailed = 11,
    Format = 12,
    Integrity = 13,
    Version = 14,
    Capacity = 15,
    UnknownValue = 16,
    MissingColumn = 17,
    IdAboveVocab = 18,
    Io = 19,
    Utf8 = 20,
    Panic = 21,
}

impl From<ErrorKind> for MltStatus {
    fn from(kind: ErrorKind) -> Self {
        match kind {
            ErrorKind::InvalidArgument => MltStatus::InvalidArgument,
            ErrorKind::NotPrime => MltStatus::NotPrime,
            ErrorKind::Overflow => MltStatus::Overflow,
            ErrorKind::ModulusMismatch => MltStatus::ModulusMismatch,
            ErrorKind::NotInvertible => MltStatus::NotInvertible,
            ErrorKind::IdOutOfRange => MltStatus::IdOutOfRange,
            ErrorKind::DigitOutOfRange => MltStatus::DigitOutOfRange,
            ErrorKind::DimensionMismatch => MltStatus::DimensionMismatch,
            ErrorKind::SingularMatrix => MltStatus::SingularMatrix,
            ErrorKind::GenerationFailed => MltStatus::GenerationFailed,
            ErrorKind::Format => MltStatus::Format,
            ErrorKind::Integrity => MltStatus::Integrity,
            ErrorKind::Version => MltStatus::Version,
            ErrorKind::Capacity => MltStatus::Capacity,
            ErrorKind::UnknownValue => MltStatus::UnknownValue,
            ErrorKind::MissingColumn => MltStatus::MissingColumn,
            ErrorKind::IdAboveVocab => MltStatus::IdAboveVocab,
            ErrorKind::Io => MltStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', "\\0")).expect("interior nuls removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

struct Failure {
    status: MltStatus,
    batch_index: Option<usize>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let f = Failure {
            status: e.kind().into(),
            batch_index: e.batch_index(),
        };
        set_last_error(e.to_string());
        f
    }
}

fn fail(status: MltStatus, msg: impl Into<String>) -> Failure {
    set_last_error(msg.into());
    Failure {
        status,
        batch_index: None,
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard<F>(err_index: *mut usize, body: F) -> MltStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MltStatus::Ok,
        Ok(Err(f)) => {
            if let (Some(i), false) = (f.batch_index, err_index.is_null()) {
                // SAFETY: caller passed a writable pointer or null.
                unsafe { *err_index = i };
            }
            f.status
        }
        Err(_) => {
            set_last_error("panic inside mlt".into());
            MltStatus::Panic
        }
    }
}

unsafe fn handle<'a>(tok: *const MltTokenizer) -> Result<&'a TokenizerConfig, Failure> {
    tok.as_ref()
        .map(|t| &t.cfg)
        .ok_or_else(|| fail(MltStatus::NullPointer, "tokenizer handle is null"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(fail(MltStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(MltStatus::Utf8, format!("{what} is not valid UTF-8")))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(MltStatus::NullPointer, format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(MltStatus::NullPointer, format!("{what} is null")));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(MltStatus::NullPointer, format!("{what} is null")))
}

fn publish(out: &mut *mut MltTokenizer, cfg: TokenizerConfig) {
    *out = Box::into_raw(Box::new(MltTokenizer { cfg }));
}

/// Fits a tokenizer for `vocab_size` ids. Exactly one of `fix_p` and
/// `fix_n` must be nonzero.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn mlt_fit(
    vocab_size: u64,
    fix_p: u64,
    fix_n: u32,
    seed: u64,
    out: *mut *mut MltTokenizer,
) -> MltStatus {
    guard(ptr::null_mut(), || {
        let out = out_ptr(out, "out")?;
        let strategy = match (fix_p, fix_n) {
            (p, 0) if p != 0 => Strategy::FixP(p),
            (0, n) if n != 0 => Strategy::FixN(n as usize),
            _ => {
                return Err(fail(
                    MltStatus::InvalidArgument,
                    "exactly one of fix_p and fix_n must be nonzero",
                ))
            }
        };
        publish(out, TokenizerConfig::fit(vocab_size, strategy, seed)?);
        Ok(())
    })
}

/// Loads and validates a config file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlt_load(path: *const c_char, out: *mut *mut MltTokenizer) -> MltStatus {
    guard(ptr::null_mut(), || {
        let path = c_str(path, "path")?;
        let out = out_ptr(out, "out")?;
        publish(out, mlt::load_config(path)?);
        Ok(())
    })
}

/// Parses and validates a config document held in memory.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlt_from_json(
    json: *const c_char,
    out: *mut *mut MltTokenizer,
) -> MltStatus {
    guard(ptr::null_mut(), || {
        let json = c_str(json, "json")?;
        let out = out_ptr(out, "out")?;
        publish(out, TokenizerConfig::from_json(json)?);
        Ok(())
    })
}

/// Writes the config document to `path`.
///
/// # Safety
/// `tok` must be a live handle; `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mlt_save(tok: *const MltTokenizer, path: *const c_char) -> MltStatus {
    guard(ptr::null_mut(), || {
        let cfg = handle(tok)?;
        let path = c_str(path, "path")?;
        mlt::save_config(cfg, path)?;
        Ok(())
    })
}

/// The config document as a newly allocated string, or null if `tok` is
/// null. Release it with [`mlt_string_free`].
///
/// # Safety
/// `tok` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mlt_to_json(tok: *const MltTokenizer) -> *mut c_char {
    match tok.as_ref() {
        Some(t) => CString::new(t.cfg.to_json())
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must come from [`mlt_to_json`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mlt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `tok` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mlt_free(tok: *mut MltTokenizer) {
    if !tok.is_null() {
        drop(Box::from_raw(tok));
    }
}

/// Field modulus `p`, or 0 for a null handle.
///
/// # Safety
/// `tok` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mlt_prime(tok: *const MltTokenizer) -> u64 {
    tok.as_ref().map_or(0, |t| t.cfg.prime().get())
}

/// Token length `n`, or 0 for a null handle.
///
/// # Safety
/// `tok` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mlt_digits(tok: *const MltTokenizer) -> usize {
    tok.as_ref().map_or(0, |t| t.cfg.digits())
}

/// # Safety
/// `tok` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mlt_vocab_size(tok: *const MltTokenizer) -> u64 {
    tok.as_ref().map_or(0, |t| t.cfg.vocab_size())
}

/// # Safety
/// `tok` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mlt_seed(tok: *const MltTokenizer) -> u64 {
    tok.as_ref().map_or(0, |t| t.cfg.seed())
}

/// Writes the `n` token digits of `id` to `out`.
///
/// # Safety
/// `tok` must be a live handle; `out` must hold `out_len` elements.
#[no_mangle]
pub unsafe extern "C" fn mlt_encode(
    tok: *const MltTokenizer,
    id: u64,
    out: *mut u32,
    out_len: usize,
) -> MltStatus {
    guard(ptr::null_mut(), || {
        let cfg = handle(tok)?;
        let out = output(out, out_len, "out")?;
        cfg.encode_into(id, out)?;
        Ok(())
    })
}

/// Decodes `len` token digits into `*out_id`.
///
/// # Safety
/// `tok` must be a live handle; `digits` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn mlt_decode(
    tok: *const MltTokenizer,
    digits: *const u32,
    len: usize,
    out_id: *mut u64,
) -> MltStatus {
    guard(ptr::null_mut(), || {
        let cfg = handle(tok)?;
        let digits = input(digits, len, "digits")?;
        let out_id = out_ptr(out_id, "out_id")?;
        *out_id = cfg.decode_digits(digits)?;
        Ok(())
    })
}

/// Encodes `count` ids into `out`, row-major, `count * n` digits. On an
/// element error the failing index is written to `err_index` if non-null.
///
/// # Safety
/// `ids` must hold `count` elements, `out` must hold `out_len`.
#[no_mangle]
pub unsafe extern "C" fn mlt_encode_batch(
    tok: *const MltTokenizer,
    ids: *const u64,
    count: usize,
    out: *mut u32,
    out_len: usize,
    err_index: *mut usize,
) -> MltStatus {
    guard(err_index, || {
        let cfg = handle(tok)?;
        let ids = input(ids, count, "ids")?;
        let out = output(out, out_len, "out")?;
        cfg.encode_batch_into(ids, out)?;
        Ok(())
    })
}

/// Decodes `count` token vectors stored row-major in `digits`
/// (`digits_len` must be `count * n`) into `out_ids`.
///
/// # Safety
/// `digits` must hold `digits_len` elements, `out_ids` must hold `count`.
#[no_mangle]
pub unsafe extern "C" fn mlt_decode_batch(
    tok: *const MltTokenizer,
    digits: *const u32,
    digits_len: usize,
    out_ids: *mut u64,
    count: usize,
    err_index: *mut usize,
) -> MltStatus {
    guard(err_index, || {
        let cfg = handle(tok)?;
        let digits = input(digits, digits_len, "digits")?;
        let out = output(out_ids, count, "out_ids")?;
        cfg.decode_batch_from(digits, out)?;
        Ok(())
    })
}

/// Writes `digit / p` for each of the `len` digits to `out`.
///
/// # Safety
/// `digits` and `out` must each hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn mlt_normalize(
    tok: *const MltTokenizer,
    digits: *const u32,
    len: usize,
    out: *mut f64,
) -> MltStatus {
    guard(ptr::null_mut(), || {
        let cfg = handle(tok)?;
        let digits = input(digits, len, "digits")?;
        let out = output(out, len, "out")?;
        let values = cfg.normalize(&TokenVector::new(digits.to_vec()))?;
        out.copy_from_slice(&values);
        Ok(())
    })
}

/// Per-head class targets of `class_id`; same digits as [`mlt_encode`].
///
/// # Safety
/// See [`mlt_encode`].
#[no_mangle]
pub unsafe extern "C" fn mlt_factorize_label(
    tok: *const MltTokenizer,
    class_id: u64,
    targets: *mut u32,
    len: usize,
) -> MltStatus {
    guard(ptr::null_mut(), || {
        let cfg = handle(tok)?;
        let out = output(targets, len, "targets")?;
        let f = cfg.factorize_label(class_id)?;
        if f.targets.len() != out.len() {
            return Err(Error::DimensionMismatch {
                expected: f.targets.len(),
                found: out.len(),
            }
            .into());
        }
        out.copy_from_slice(&f.targets);
        Ok(())
    })
}

/// Class id from per-head predictions. May exceed the vocabulary size.
///
/// # Safety
/// See [`mlt_decode`].
#[no_mangle]
pub unsafe extern "C" fn mlt_reconstruct_label(
    tok: *const MltTokenizer,
    predicted: *const u32,
    len: usize,
    out_class: *mut u64,
) -> MltStatus {
    guard(ptr::null_mut(), || {
        let cfg = handle(tok)?;
        let predicted = input(predicted, len, "predicted")?;
        let out = out_ptr(out_class, "out_class")?;
        *out = cfg.reconstruct_label(predicted)?;
        Ok(())
    })
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mlt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code, e.g. `"ID_OUT_OF_RANGE"`.
#[no_mangle]
pub extern "C" fn mlt_status_name(status: MltStatus) -> *const c_char {
    let name: &'static CStr = match status {
        MltStatus::Ok => c"OK",
        MltStatus::NullPointer => c"NULL_POINTER",
        MltStatus::InvalidArgument => c"INVALID_ARGUMENT",
        MltStatus::NotPrime => c"NOT_PRIME",
        MltStatus::Overflow => c"OVERFLOW",
        MltStatus::ModulusMismatch => c"MODULUS_MISMATCH",
        MltStatus::NotInvertible => c"NOT_INVERTIBLE",
        MltStatus::IdOutOfRange => c"ID_OUT_OF_RANGE",
        MltStatus::DigitOutOfRange => c"DIGIT_OUT_OF_RANGE",
        MltStatus::DimensionMismatch => c"DIMENSION_MISMATCH",
        MltStatus::SingularMatrix => c"SINGULAR_MATRIX",
        MltStatus::GenerationFailed => c"GENERATION_FAILED",
        MltStatus::Format => c"FORMAT",
        MltStatus::Integrity => c"INTEGRITY",
        MltStatus::Version => c"VERSION",
        MltStatus::Capacity => c"CAPACITY",
        MltStatus::UnknownValue => c"UNKNOWN_VALUE",
        MltStatus::MissingColumn => c"MISSING_COLUMN",
        MltStatus::IdAboveVocab => c"ID_ABOVE_VOCAB",
        MltStatus::Io => c"IO",
        MltStatus::Utf8 => c"UTF8",
        MltStatus::Panic => c"PANIC",
    };
    name.as_ptr()
}
