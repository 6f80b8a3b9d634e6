use std::ffi::{CStr, CString};
use std::ptr;

use fbm_local_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fl_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn scalar_functions_and_status_codes() {
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(fl_a_h(0.5, &mut v), FL_OK);
        assert_eq!(v, 1.0);
        assert!(last_error().is_empty());
        assert_eq!(fl_r_h_spectral(0.5, &mut v), FL_OK);
        assert_eq!(v, 0.0);
        assert_eq!(fl_fbm_cov(2.0, 2.0, 0.25, &mut v), FL_OK);
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(fl_increment_cov(0.0, 1.0, 1.0, 2.0, 0.5, &mut v), FL_OK);
        assert!(v.abs() < 1e-15);
        assert_eq!(fl_increment_cov(1.0, 1.0, 1.0, 2.0, 0.5, &mut v), FL_INVALID_ARGUMENT);
        assert!(last_error().contains("invalid"));
        assert_eq!(fl_fbm_cov(1.0, 1.0, 0.0, &mut v), FL_INVALID_ARGUMENT);
        assert_eq!(fl_fbm_cov(-1.0, 1.0, 0.5, &mut v), FL_INVALID_ARGUMENT);
        assert_eq!(fl_a_h(0.5, ptr::null_mut()), FL_NULL_POINTER);
        assert_eq!(fl_riesz_fourier_constant(1, 0.5, &mut v), FL_OK);
        assert!((v - 1.0).abs() < 1e-13);
        assert_eq!(fl_riesz_fourier_constant(0, 0.5, &mut v), FL_INVALID_ARGUMENT);
        let u = [0.0, 1.0];
        let w = [1.0, 0.0];
        assert_eq!(fl_levy_fbm_cov(u.as_ptr(), w.as_ptr(), 2, 0.5, &mut v), FL_OK);
        assert!((v - (1.0 - 0.5 * 2f64.sqrt())).abs() < 1e-14);
        assert_eq!(
            fl_levy_fbm_cov(ptr::null(), w.as_ptr(), 2, 0.5, &mut v),
            FL_NULL_POINTER
        );
        let ver = CStr::from_ptr(fl_version()).to_str().unwrap();
        assert_eq!(ver, env!("CARGO_PKG_VERSION"));
    }
}

fn grams(h: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let a = [-2.0, -1.5, -1.5, -1.0, -1.0, -0.5];
    let b = [0.5, 1.0, 1.0, 1.25];
    let mut ga = vec![0.0; 9];
    let mut gb = vec![0.0; 4];
    let mut c = vec![0.0; 6];
    unsafe {
        assert_eq!(fl_gram(a.as_ptr(), 3, h, ga.as_mut_ptr()), FL_OK);
        assert_eq!(fl_gram(b.as_ptr(), 2, h, gb.as_mut_ptr()), FL_OK);
        assert_eq!(fl_cross_gram(a.as_ptr(), 3, b.as_ptr(), 2, h, c.as_mut_ptr()), FL_OK);
    }
    (ga, gb, c)
}

#[test]
fn spectrum_handle_round_trip() {
    let (ga, gb, c) = grams(0.8);
    assert!((ga[0] - 0.5f64.powf(1.6)).abs() < 1e-15);
    assert_eq!(ga[1], ga[3]);
    let mut spec: *mut FlSpectrum = ptr::null_mut();
    unsafe {
        assert_eq!(
            fl_spectrum_new(ga.as_ptr(), 3, gb.as_ptr(), 2, c.as_ptr(), 1e-10, &mut spec),
            FL_OK
        );
        assert!(!spec.is_null());
        let mut len = 0;
        assert_eq!(fl_spectrum_len(spec, &mut len), FL_OK);
        assert_eq!(len, 2);
        let mut sig = [0.0; 2];
        assert_eq!(fl_spectrum_sigmas(spec, sig.as_mut_ptr(), 1), FL_INVALID_ARGUMENT);
        assert_eq!(fl_spectrum_sigmas(spec, sig.as_mut_ptr(), 2), FL_OK);
        assert!(sig[0] >= sig[1] && sig[0] < 1.0 && sig[1] >= 0.0);
        let mut cos = 0.0;
        assert_eq!(fl_spectrum_cos_angle(spec, &mut cos), FL_OK);
        assert_eq!(cos, sig[0]);
        let mut info = FlSpectrumInfo::default();
        assert_eq!(fl_spectrum_info(spec, &mut info), FL_OK);
        assert_eq!((info.rank_a, info.rank_b, info.dim_a, info.dim_b), (3, 2, 3, 2));
        assert!(!info.ill_conditioned);
        let (mut mi, mut lo, mut hi) = (0.0, 0.0, 0.0);
        assert_eq!(fl_spectrum_mi(spec, &mut mi, &mut lo, &mut hi), FL_OK);
        assert_eq!(fl_spectrum_mi(spec, &mut mi, ptr::null_mut(), ptr::null_mut()), FL_OK);
        assert!(lo <= mi && mi <= hi);
        let mut det = 0.0;
        assert_eq!(
            fl_mutual_information_det(ga.as_ptr(), 3, gb.as_ptr(), 2, c.as_ptr(), &mut det),
            FL_OK
        );
        assert!((mi - det).abs() <= 1e-10 * det);
        fl_spectrum_free(spec);
        fl_spectrum_free(ptr::null_mut());
        assert_eq!(fl_spectrum_len(ptr::null(), &mut len), FL_NULL_POINTER);
    }
}

#[test]
fn degenerate_and_mismatched_input() {
    let zero = [0.0; 4];
    let one = [1.0];
    let mut spec: *mut FlSpectrum = ptr::null_mut();
    unsafe {
        let code = fl_spectrum_new(zero.as_ptr(), 2, one.as_ptr(), 1, zero.as_ptr(), 1e-10, &mut spec);
        assert_eq!(code, FL_DEGENERATE);
        assert!(spec.is_null());
        let asym = [1.0, 0.5, 0.0, 1.0];
        let code = fl_spectrum_new(asym.as_ptr(), 2, one.as_ptr(), 1, zero.as_ptr(), 1e-10, &mut spec);
        assert_eq!(code, FL_INVALID_ARGUMENT);
        assert!(last_error().contains("symmetric"));
        let mut v = 0.0;
        let dup = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(
            fl_mutual_information_det(one.as_ptr(), 1, one.as_ptr(), 1, dup.as_ptr(), &mut v),
            FL_DEGENERATE
        );
    }
}

#[test]
fn scan_handle_round_trip() {
    let eps = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let mut t: *mut FlScanTable = ptr::null_mut();
    unsafe {
        assert_eq!(fl_scan_new(0.25, 0.0, 1.0, eps.as_ptr(), 5, 16, 1e-10, &mut t), FL_OK);
        let mut n = 0;
        assert_eq!(fl_scan_row_count(t, &mut n), FL_OK);
        assert_eq!(n, 5);
        let mut row = FlScanRow::default();
        assert_eq!(fl_scan_row(t, 4, &mut row), FL_OK);
        assert_eq!(row.eps, 0.0125);
        assert!(row.hs_lower <= row.mi && row.mi <= row.hs_upper);
        assert_eq!(fl_scan_row(t, 5, &mut row), FL_INVALID_ARGUMENT);
        let mut fit = FlFit::default();
        assert_eq!(fl_scan_fit(t, FL_COLUMN_COS_ANGLE, 1.5, &mut fit), FL_OK);
        assert!(fit.theory_gap < 0.1, "{fit:?}");
        assert_eq!(fl_scan_fit(t, 9, 1.5, &mut fit), FL_INVALID_ARGUMENT);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.csv");
        let cpath = CString::new(path.to_str().unwrap()).unwrap();
        assert_eq!(fl_scan_write_csv(t, cpath.as_ptr()), FL_OK);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# H=0.25\n"));
        let bad = CString::new("/nonexistent-dir/x.csv").unwrap();
        assert_eq!(fl_scan_write_csv(t, bad.as_ptr()), FL_IO);
        assert_eq!(fl_scan_write_csv(t, ptr::null()), FL_NULL_POINTER);
        fl_scan_free(t);
        let mut t2: *mut FlScanTable = ptr::null_mut();
        assert_eq!(
            fl_scan_new(0.5, 0.0, 1.0, eps.as_ptr(), 5, 2, 1e-10, &mut t2),
            FL_INVALID_ARGUMENT
        );
        assert!(t2.is_null());
    }
}

#[test]
fn errors_are_thread_local() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(fl_a_h(2.0, &mut v), FL_INVALID_ARGUMENT);
    }
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_empty());
    assert!(!last_error().is_empty());
}
