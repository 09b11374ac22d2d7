use quartic_census_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qc_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn field_lifecycle_and_counts() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(qc_field_new(-4, &mut f), QcStatus::Ok);
        let mut d = 0;
        assert_eq!(qc_field_disc(f, &mut d), QcStatus::Ok);
        assert_eq!(d, -4);
        let (mut a, mut b) = (0u64, 0u64);
        assert_eq!(qc_count_relative(f, 16.0, QcEngine::Direct, &mut a), QcStatus::Ok);
        assert_eq!(qc_count_relative(f, 16.0, QcEngine::Characters, &mut b), QcStatus::Ok);
        assert_eq!((a, b), (2, 2));
        let mut c = 0.0;
        assert_eq!(qc_main_term(f, &mut c), QcStatus::Ok);
        assert!((c - 0.2606346964945646).abs() < 1e-12);
        qc_field_free(f);
        qc_field_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(qc_field_new(9, &mut f), QcStatus::NotFundamental);
        assert!(f.is_null());
        assert!(last_error().contains("not a fundamental discriminant"));
        assert_eq!(qc_field_new(5, ptr::null_mut()), QcStatus::NullPointer);
        assert_eq!(qc_field_disc(ptr::null(), &mut 0), QcStatus::NullPointer);
        assert_eq!(qc_constant_c(2, &mut QcInterval::default()), QcStatus::InvalidArgument);
        let msg = CStr::from_ptr(qc_status_message(QcStatus::Invariant));
        assert_eq!(msg.to_str().unwrap(), "internal invariant violated");
        let mut g = ptr::null_mut();
        assert_eq!(qc_field_new(5, &mut g), QcStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(qc_count_relative(g, -1.0, QcEngine::Direct, &mut 0), QcStatus::InvalidArgument);
        qc_field_free(g);
    }
}

#[test]
fn census_handle() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(qc_census_run(1000, &mut c), QcStatus::Ok);
        let mut counts = QcCensusCounts::default();
        assert_eq!(qc_census_counts(c, &mut counts), QcStatus::Ok);
        assert_eq!((counts.total, counts.n_d4, counts.n_c4, counts.n_v4, counts.identity_ok), (73, 24, 1, 8, 1));
        let mut n = 0usize;
        assert_eq!(qc_census_field_count(c, &mut n), QcStatus::Ok);
        let mut sum = 0;
        for i in 0..n {
            let mut row = QcFieldRow::default();
            assert_eq!(qc_census_field_row(c, i, &mut row), QcStatus::Ok);
            sum += row.count;
        }
        assert_eq!(sum, counts.total);
        assert_eq!(qc_census_field_row(c, n, &mut QcFieldRow::default()), QcStatus::InvalidArgument);
        let mut v4 = 0;
        assert_eq!(qc_v4_count(1000, &mut v4), QcStatus::Ok);
        assert_eq!(v4, counts.n_v4);
        qc_census_free(c);
    }
}

#[test]
fn constant_interval() {
    let mut iv = QcInterval::default();
    assert_eq!(unsafe { qc_constant_c(1000, &mut iv) }, QcStatus::Ok);
    assert!(iv.lo < iv.midpoint && iv.midpoint < iv.hi);
    assert!((iv.hi - iv.lo - iv.width).abs() < 1e-15);
}

#[test]
fn header_declares_the_api() {
    let h = include_str!("../include/quartic_census.h");
    for name in [
        "qc_field_new",
        "qc_field_free",
        "qc_count_relative",
        "qc_census_run",
        "qc_census_field_row",
        "qc_constant_c",
        "qc_last_error_message",
        "typedef struct QcField QcField",
        "QC_STATUS_NOT_FUNDAMENTAL = 2",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
