use std::ffi::{CStr, CString};
use std::ptr;

use roy_detect_ffi::*;

fn last_error() -> String {
    let p = rd_last_error_message();
    assert!(!p.is_null());
    // SAFETY: non-null pointer to a NUL-terminated string owned by the library.
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_nonempty() {
    // SAFETY: static NUL-terminated string.
    let v = unsafe { CStr::from_ptr(rd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn cdfs_and_error_codes() {
    let mut v = f64::NAN;
    // n = m: F(t) = (t/(1+t))^{mp}.
    assert_eq!(unsafe { rd_central_cdf(2, 2, 3, 1.5, &mut v) }, RdStatus::Ok);
    assert!((v - 0.6f64.powi(6)).abs() < 1e-14);
    assert!(rd_last_error_message().is_null());
    let mut w = f64::NAN;
    assert_eq!(unsafe { rd_noncentral_cdf(4, 8, 6, 10.0, 2.0, &mut w) }, RdStatus::Ok);
    assert!(w > 0.0 && w < 1.0);
    let mut untouched = -7.0;
    assert_eq!(unsafe { rd_central_cdf(3, 2, 3, 1.0, &mut untouched) }, RdStatus::InvalidDims);
    assert_eq!(untouched, -7.0);
    assert!(last_error().contains("n >= m"));
    assert_eq!(unsafe { rd_central_cdf(2, 2, 3, 1.0, ptr::null_mut()) }, RdStatus::NullPointer);
    assert!(last_error().contains("null"));
    assert_eq!(unsafe { rd_noncentral_cdf(2, 3, 3, 0.0, 1.0, &mut v) }, RdStatus::InvalidArgument);
}

#[test]
fn detector_handle_lifecycle() {
    let mut det: *mut RdDetector = ptr::null_mut();
    assert_eq!(unsafe { rd_detector_new(4, 8, 6, 10.0, &mut det) }, RdStatus::Ok);
    assert!(!det.is_null());
    let mut xi = 0.0;
    assert_eq!(unsafe { rd_detector_threshold(det, 0.1, &mut xi) }, RdStatus::Ok);
    let mut pf = 0.0;
    assert_eq!(unsafe { rd_detector_pfa(det, xi, &mut pf) }, RdStatus::Ok);
    assert!((pf - 0.1).abs() < 1e-9);
    let mut pd = 0.0;
    assert_eq!(unsafe { rd_detector_pd(det, xi, &mut pd) }, RdStatus::Ok);
    assert!(pd > 0.1 && pd < 1.0);
    let grid = [0.05, 0.1, 0.5];
    let mut pds = [0.0; 3];
    let mut ths = [0.0; 3];
    assert_eq!(
        unsafe { rd_detector_roc(det, grid.as_ptr(), 3, pds.as_mut_ptr(), ths.as_mut_ptr()) },
        RdStatus::Ok
    );
    assert!((pds[1] - pd).abs() < 1e-12 && (ths[1] - xi).abs() < 1e-12 * xi);
    let bad = [0.5, 0.1];
    assert_eq!(
        unsafe { rd_detector_roc(det, bad.as_ptr(), 2, pds.as_mut_ptr(), ptr::null_mut()) },
        RdStatus::InvalidArgument
    );
    assert_eq!(unsafe { rd_detector_pd(ptr::null(), 1.0, &mut pd) }, RdStatus::NullPointer);
    unsafe {
        rd_detector_free(det);
        rd_detector_free(ptr::null_mut());
    }
    let mut closed = 0.0;
    assert_eq!(unsafe { rd_roc_closed_form(2, 4, 5.0, 0.1, &mut closed) }, RdStatus::Ok);
    assert!(closed > 0.1);
}

#[test]
fn asymptotic_entry_points() {
    let mut e = RdEdgeParams::default();
    assert_eq!(unsafe { rd_edge_params(0.25, 0.5, &mut e) }, RdStatus::Ok);
    assert!((e.mu - 12.824555).abs() < 1e-5 && (e.gamma_p - 2.581139).abs() < 1e-5);
    let mut s = RdSpikeParams::default();
    assert_eq!(unsafe { rd_spike_params(0.25, 0.5, 5.0, &mut s) }, RdStatus::Ok);
    assert_eq!(s.supercritical, 1);
    assert!((s.nu - 15.75).abs() < 1e-12);
    assert_eq!(unsafe { rd_spike_params(0.25, 0.5, 1.0, &mut s) }, RdStatus::Ok);
    assert_eq!(s.supercritical, 0);
    assert!(s.nu.is_nan());
    let mut pw = 0.0;
    assert_eq!(unsafe { rd_asymptotic_power(0.25, 0.5, 5.0, 100, 0.05, ptr::null(), &mut pw) }, RdStatus::Ok);
    assert!(pw > 0.9 && pw < 1.0);
    assert_eq!(
        unsafe { rd_asymptotic_power(0.25, 0.5, 1.0, 100, 0.05, ptr::null(), &mut pw) },
        RdStatus::Subcritical
    );
    assert_eq!(unsafe { rd_edge_params(1.5, 0.5, &mut e) }, RdStatus::InvalidArgument);
}

#[test]
fn tw2_tables() {
    let mut q = 0.0;
    assert_eq!(unsafe { rd_tw2_quantile(ptr::null(), 0.95, &mut q) }, RdStatus::Ok);
    let mut f = 0.0;
    assert_eq!(unsafe { rd_tw2_cdf(ptr::null(), q, &mut f) }, RdStatus::Ok);
    assert!((f - 0.95).abs() < 1e-12);
    assert_eq!(unsafe { rd_tw2_quantile(ptr::null(), 1.0, &mut q) }, RdStatus::InvalidArgument);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    std::fs::write(&path, "# toy\n0 0.1\n1 0.9\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut h: *mut RdTw2Table = ptr::null_mut();
    assert_eq!(unsafe { rd_tw2_table_load(c.as_ptr(), &mut h) }, RdStatus::Ok);
    assert_eq!(unsafe { rd_tw2_cdf(h, 0.5, &mut f) }, RdStatus::Ok);
    assert!((f - 0.5).abs() < 1e-12);
    unsafe { rd_tw2_table_free(h) };

    std::fs::write(&path, "0 0.5\n1 0.2\n").unwrap();
    let mut h: *mut RdTw2Table = ptr::null_mut();
    assert_eq!(unsafe { rd_tw2_table_load(c.as_ptr(), &mut h) }, RdStatus::TableFormat);
    assert!(h.is_null());
    assert_eq!(unsafe { rd_tw2_table_load(ptr::null(), &mut h) }, RdStatus::NullPointer);
}

#[test]
fn simulation_is_deterministic_and_sorted() {
    let mut a = vec![0.0; 200];
    let mut b = vec![0.0; 200];
    assert_eq!(unsafe { rd_simulate(3, 5, 4, 2.0, 200, 7, 0, 1, a.as_mut_ptr()) }, RdStatus::Ok);
    assert_eq!(unsafe { rd_simulate(3, 5, 4, 2.0, 200, 7, 0, 1, b.as_mut_ptr()) }, RdStatus::Ok);
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(unsafe { rd_simulate(3, 5, 4, 2.0, 0, 7, 0, 1, a.as_mut_ptr()) }, RdStatus::InvalidArgument);
    assert_eq!(unsafe { rd_simulate(3, 5, 4, 2.0, 5, 7, 0, 1, ptr::null_mut()) }, RdStatus::NullPointer);
}
