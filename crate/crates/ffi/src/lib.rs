//! C interface to `quartic_census`.
//!
//! Every function returns a [`QcStatus`]; results go through out-pointers.
//! Fields and census runs are opaque handles owned by the caller and
//! released with the matching `_free` function. After a failure,
//! [`qc_last_error_message`] describes it on the calling thread.

use quartic_census::analytic::{constant_c, main_term_f64};
use quartic_census::census::{self, CensusResult};
use quartic_census::counting::FieldEngine;
use quartic_census::quadfield::QuadField;
use quartic_census::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    NotFundamental = 2,
    InvalidArgument = 3,
    Data = 4,
    Invariant = 5,
    Io = 6,
    Panic = 7,
}

/// Which counting engine to run.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcEngine {
    Direct = 0,
    Characters = 1,
}

/// A quadratic field with its counting engine.
pub struct QcField {
    field: QuadField,
    engine: FieldEngine,
}

/// A finished census.
pub struct QcCensus {
    result: CensusResult,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QcCensusCounts {
    pub x: u64,
    pub total: u64,
    pub n_d4: u64,
    pub n_c4: u64,
    pub n_v4: u64,
    /// 1 if `total = 2 n_d4 + n_c4 + 3 n_v4`.
    pub identity_ok: u8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QcFieldRow {
    pub disc: i64,
    pub bound: u64,
    pub count: u64,
    pub n_c4: u64,
    pub n_v4: u64,
    pub n_d4: u64,
}

/// Certified enclosure `[lo, hi]` of the `D4` constant.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QcInterval {
    pub lo: f64,
    pub hi: f64,
    pub midpoint: f64,
    pub width: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QcStatus {
    match e {
        Error::NotFundamental(_) | Error::ImaginaryField(_) => QcStatus::NotFundamental,
        Error::InvalidArgument(_) => QcStatus::InvalidArgument,
        Error::Data { .. } => QcStatus::Data,
        Error::Invariant(_) | Error::NotASquareClass => QcStatus::Invariant,
        Error::Io(_) => QcStatus::Io,
    }
}

/// Runs `f`, recording errors and panics for [`qc_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), QcStatusOr>) -> QcStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcStatus::Ok,
        Ok(Err(QcStatusOr::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Ok(Err(QcStatusOr::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            QcStatus::Panic
        }
    }
}

enum QcStatusOr {
    Status(QcStatus, &'static str),
    Lib(Error),
}

impl From<Error> for QcStatusOr {
    fn from(e: Error) -> Self {
        QcStatusOr::Lib(e)
    }
}

const NULL: QcStatusOr = QcStatusOr::Status(QcStatus::NullPointer, "null pointer argument");

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qc_status_message(status: QcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        QcStatus::Ok => c"ok",
        QcStatus::NullPointer => c"null pointer argument",
        QcStatus::NotFundamental => c"not a fundamental discriminant",
        QcStatus::InvalidArgument => c"invalid argument",
        QcStatus::Data => c"malformed data",
        QcStatus::Invariant => c"internal invariant violated",
        QcStatus::Io => c"i/o error",
        QcStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message for the last failure on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates the field of discriminant `disc`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_field_new(disc: i64, out: *mut *mut QcField) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return Err(NULL);
        }
        let field = QuadField::new(disc)?;
        let engine = FieldEngine::new(&field)?;
        *out = Box::into_raw(Box::new(QcField { field, engine }));
        Ok(())
    })
}

/// # Safety
/// `field` must be null or come from [`qc_field_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn qc_field_free(field: *mut QcField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_field_disc(field: *const QcField, out: *mut i64) -> QcStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return Err(NULL);
        };
        *out = f.field.disc();
        Ok(())
    })
}

/// Number of quadratic extensions with relative discriminant norm at most
/// `bound`.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_count_relative(
    field: *const QcField,
    bound: f64,
    engine: QcEngine,
    out: *mut u64,
) -> QcStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return Err(NULL);
        };
        *out = match engine {
            QcEngine::Direct => f.engine.count_direct(bound, false)?.total,
            QcEngine::Characters => {
                let n = f.engine.count_characters(bound)?;
                u64::try_from(n).map_err(|_| Error::Invariant(format!("negative count {n}")))?
            }
        };
        Ok(())
    })
}

/// `zeta_k^*(1) / (2^r2 zeta_k(2))` in double precision.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_main_term(field: *const QcField, out: *mut f64) -> QcStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return Err(NULL);
        };
        *out = main_term_f64(f.field.disc())?;
        Ok(())
    })
}

/// Runs the census at `x` with the `D4` pairing audit.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_census_run(x: u64, out: *mut *mut QcCensus) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return Err(NULL);
        }
        let result = census::quad_over_quad_total(x)?;
        *out = Box::into_raw(Box::new(QcCensus { result }));
        Ok(())
    })
}

/// # Safety
/// `census` must be null or come from [`qc_census_run`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn qc_census_free(census: *mut QcCensus) {
    if !census.is_null() {
        drop(Box::from_raw(census));
    }
}

/// # Safety
/// `census` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_census_counts(census: *const QcCensus, out: *mut QcCensusCounts) -> QcStatus {
    guard(|| {
        let (Some(c), false) = (census.as_ref(), out.is_null()) else {
            return Err(NULL);
        };
        let r = &c.result;
        *out = QcCensusCounts {
            x: r.x,
            total: r.total,
            n_d4: r.n_d4,
            n_c4: r.n_c4,
            n_v4: r.n_v4,
            identity_ok: r.identity_holds() as u8,
        };
        Ok(())
    })
}

/// Number of quadratic fields in the census.
///
/// # Safety
/// `census` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_census_field_count(census: *const QcCensus, out: *mut usize) -> QcStatus {
    guard(|| {
        let (Some(c), false) = (census.as_ref(), out.is_null()) else {
            return Err(NULL);
        };
        *out = c.result.per_field.len();
        Ok(())
    })
}

/// Row `index` of the per-field breakdown.
///
/// # Safety
/// `census` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_census_field_row(census: *const QcCensus, index: usize, out: *mut QcFieldRow) -> QcStatus {
    guard(|| {
        let (Some(c), false) = (census.as_ref(), out.is_null()) else {
            return Err(NULL);
        };
        let r = c
            .result
            .per_field
            .get(index)
            .ok_or(QcStatusOr::Status(QcStatus::InvalidArgument, "row index out of range"))?;
        *out = QcFieldRow {
            disc: r.disc,
            bound: r.bound,
            count: r.count,
            n_c4: r.by_type.c4,
            n_v4: r.by_type.v4,
            n_d4: r.by_type.d4,
        };
        Ok(())
    })
}

/// Certified interval for the `D4` constant from fields with `|disc| <= b`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_constant_c(b: u64, out: *mut QcInterval) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return Err(NULL);
        }
        let c = constant_c(b)?;
        *out = QcInterval { lo: c.lo, hi: c.hi, midpoint: c.midpoint(), width: c.width() };
        Ok(())
    })
}

/// `V4` fields with `|disc| <= x` from discriminant triples.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_v4_count(x: u64, out: *mut u64) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return Err(NULL);
        }
        *out = census::v4_independent(x);
        Ok(())
    })
}
