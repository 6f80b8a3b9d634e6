//! C ABI over `fbm-local`.
//!
//! Every fallible function returns an `FL_*` status code and writes its
//! result through an out pointer. After a nonzero status,
//! `fl_last_error` returns a message for the calling thread. Matrices are
//! passed dense and row-major. Interval bases are arrays of `(s, t)`
//! pairs, flattened to `2 * n` doubles. Infinite information is reported
//! as `INFINITY`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fbm_local::geometry::{
    canonical_correlations, cos_angle, mi_bounds_hs, mutual_information_det, mutual_information_gy, CanonicalSpectrum,
};
use fbm_local::kernels::{self, Hurst, IncrementBasis, Point, TimePair};
use fbm_local::lab::{fit_rows, local_independence_scan, output, Column, ScanConfig, ScanTable};
use fbm_local::sobolev;
use fbm_local::Error;
use nalgebra::DMatrix;

pub const FL_OK: i32 = 0;
pub const FL_INVALID_ARGUMENT: i32 = 1;
pub const FL_NULL_POINTER: i32 = 2;
pub const FL_DEGENERATE: i32 = 3;
pub const FL_NUMERICAL: i32 = 4;
pub const FL_IO: i32 = 5;
pub const FL_PANIC: i32 = 6;

pub const FL_COLUMN_COS_ANGLE: i32 = 0;
pub const FL_COLUMN_MI: i32 = 1;
pub const FL_COLUMN_HS_NORM: i32 = 2;

/// Canonical correlations of two subspaces.
pub struct FlSpectrum {
    inner: CanonicalSpectrum,
}

/// Rows of an angle and information scan between two windows.
pub struct FlScanTable {
    inner: ScanTable,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlSpectrumInfo {
    pub rank_a: usize,
    pub rank_b: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub cond: f64,
    pub ill_conditioned: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlScanRow {
    pub eps: f64,
    pub cos_angle: f64,
    pub mi: f64,
    pub hs_lower: f64,
    pub hs_upper: f64,
    pub hs_norm: f64,
    pub rank_a: usize,
    pub rank_b: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub cond: f64,
    pub ill_conditioned: bool,
    pub skipped: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub theory_slope: f64,
    pub theory_gap: f64,
    pub points: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Code(i32, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidParameter { .. } | Error::DimensionMismatch(_) => FL_INVALID_ARGUMENT,
            Error::Degenerate(_) => FL_DEGENERATE,
            Error::Io(_) => FL_IO,
            _ => FL_NUMERICAL,
        };
        Fail::Code(code, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail::Code(FL_NULL_POINTER, format!("`{what}` is null"))
}

fn bad(msg: impl Into<String>) -> Fail {
    Fail::Code(FL_INVALID_ARGUMENT, msg.into())
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FL_OK
        }
        Ok(Err(Fail::Code(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            FL_PANIC
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

unsafe fn matrix(p: *const f64, rows: usize, cols: usize, what: &str) -> Result<DMatrix<f64>, Fail> {
    let s = unsafe { slice(p, rows * cols, what) }?;
    Ok(DMatrix::from_row_slice(rows, cols, s))
}

unsafe fn basis(p: *const f64, n: usize, what: &str) -> Result<IncrementBasis, Fail> {
    let s = unsafe { slice(p, 2 * n, what) }?;
    let pairs = s
        .chunks_exact(2)
        .map(|c| TimePair::new(c[0], c[1]))
        .collect::<fbm_local::Result<Vec<_>>>()?;
    Ok(IncrementBasis::new(pairs)?)
}

fn write_matrix(m: &DMatrix<f64>, out: &mut [f64]) {
    let cols = m.ncols();
    for i in 0..m.nrows() {
        for j in 0..cols {
            out[i * cols + j] = m[(i, j)];
        }
    }
}

fn mi_f64(v: fbm_local::geometry::MiValue) -> f64 {
    v.finite().unwrap_or(f64::INFINITY)
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fl_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// R_H(u, v) for u, v >= 0.
#[no_mangle]
pub unsafe extern "C" fn fl_fbm_cov(u: f64, v: f64, h: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        if u < 0.0 || v < 0.0 {
            return Err(bad(format!("times must be nonnegative, got {u} and {v}")));
        }
        *out = kernels::fbm_cov(u, v, Hurst::new(h)?);
        Ok(())
    })
}

/// Covariance of the increments over (s1, t1) and (s2, t2).
#[no_mangle]
pub unsafe extern "C" fn fl_increment_cov(s1: f64, t1: f64, s2: f64, t2: f64, h: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        let p = TimePair::new(s1, t1)?;
        let q = TimePair::new(s2, t2)?;
        *out = kernels::increment_cov(&p, &q, Hurst::new(h)?);
        Ok(())
    })
}

/// Covariance of Levy fBm at two points of dimension `dim`.
#[no_mangle]
pub unsafe extern "C" fn fl_levy_fbm_cov(u: *const f64, v: *const f64, dim: usize, h: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        let pu = Point::new(unsafe { slice(u, dim, "u") }?.to_vec())?;
        let pv = Point::new(unsafe { slice(v, dim, "v") }?.to_vec())?;
        *out = kernels::levy_fbm_cov(&pu, &pv, Hurst::new(h)?)?;
        Ok(())
    })
}

/// Gram matrix of `n` increments; `out` holds `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn fl_gram(pairs: *const f64, n: usize, h: f64, out: *mut f64) -> i32 {
    guard(|| {
        let b = unsafe { basis(pairs, n, "pairs") }?;
        let out = unsafe { slice_mut(out, n * n, "out") }?;
        write_matrix(&kernels::gram(&b, Hurst::new(h)?), out);
        Ok(())
    })
}

/// Cross-covariance of two increment bases; `out` holds `na * nb` doubles.
#[no_mangle]
pub unsafe extern "C" fn fl_cross_gram(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    h: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let ba = unsafe { basis(a, na, "a") }?;
        let bb = unsafe { basis(b, nb, "b") }?;
        let out = unsafe { slice_mut(out, na * nb, "out") }?;
        write_matrix(&kernels::cross_gram(&ba, &bb, Hurst::new(h)?), out);
        Ok(())
    })
}

/// Canonical correlations from Gram matrices `ga` (na x na), `gb` (nb x nb)
/// and the cross-covariance `c` (na x nb). Free with `fl_spectrum_free`.
#[no_mangle]
pub unsafe extern "C" fn fl_spectrum_new(
    ga: *const f64,
    na: usize,
    gb: *const f64,
    nb: usize,
    c: *const f64,
    rtol: f64,
    out: *mut *mut FlSpectrum,
) -> i32 {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        *out = std::ptr::null_mut();
        let ga = unsafe { matrix(ga, na, na, "ga") }?;
        let gb = unsafe { matrix(gb, nb, nb, "gb") }?;
        let c = unsafe { matrix(c, na, nb, "c") }?;
        let inner = canonical_correlations(&ga, &gb, &c, rtol)?;
        *out = Box::into_raw(Box::new(FlSpectrum { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_spectrum_free(spec: *mut FlSpectrum) {
    if !spec.is_null() {
        drop(unsafe { Box::from_raw(spec) });
    }
}

unsafe fn spectrum<'a>(p: *const FlSpectrum) -> Result<&'a CanonicalSpectrum, Fail> {
    unsafe { p.as_ref() }.map(|s| &s.inner).ok_or_else(|| null("spectrum"))
}

/// Number of canonical correlations.
#[no_mangle]
pub unsafe extern "C" fn fl_spectrum_len(spec: *const FlSpectrum, out: *mut usize) -> i32 {
    guard(|| {
        let s = unsafe { spectrum(spec) }?;
        *unsafe { out_ref(out, "out") }? = s.sigmas.len();
        Ok(())
    })
}

/// Copies the correlations, largest first, into `out` of capacity `cap`.
#[no_mangle]
pub unsafe extern "C" fn fl_spectrum_sigmas(spec: *const FlSpectrum, out: *mut f64, cap: usize) -> i32 {
    guard(|| {
        let s = unsafe { spectrum(spec) }?;
        if cap < s.sigmas.len() {
            return Err(bad(format!(
                "capacity {cap} is below the spectrum length {}",
                s.sigmas.len()
            )));
        }
        unsafe { slice_mut(out, s.sigmas.len(), "out") }?.copy_from_slice(&s.sigmas);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_spectrum_info(spec: *const FlSpectrum, out: *mut FlSpectrumInfo) -> i32 {
    guard(|| {
        let s = unsafe { spectrum(spec) }?;
        *unsafe { out_ref(out, "out") }? = FlSpectrumInfo {
            rank_a: s.rank_a,
            rank_b: s.rank_b,
            dim_a: s.dim_a,
            dim_b: s.dim_b,
            cond: s.cond,
            ill_conditioned: s.ill_conditioned(),
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_spectrum_cos_angle(spec: *const FlSpectrum, out: *mut f64) -> i32 {
    guard(|| {
        let s = unsafe { spectrum(spec) }?;
        *unsafe { out_ref(out, "out") }? = cos_angle(s);
        Ok(())
    })
}

/// Information and its Hilbert-Schmidt bounds. `lower` and `upper` may be null.
#[no_mangle]
pub unsafe extern "C" fn fl_spectrum_mi(
    spec: *const FlSpectrum,
    mi: *mut f64,
    lower: *mut f64,
    upper: *mut f64,
) -> i32 {
    guard(|| {
        let s = unsafe { spectrum(spec) }?;
        *unsafe { out_ref(mi, "mi") }? = mi_f64(mutual_information_gy(s).value);
        let b = mi_bounds_hs(s);
        if let Some(l) = unsafe { lower.as_mut() } {
            *l = b.lower;
        }
        if let Some(u) = unsafe { upper.as_mut() } {
            *u = mi_f64(b.upper);
        }
        Ok(())
    })
}

/// Information from the joint covariance determinant.
#[no_mangle]
pub unsafe extern "C" fn fl_mutual_information_det(
    ga: *const f64,
    na: usize,
    gb: *const f64,
    nb: usize,
    c: *const f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        let ga = unsafe { matrix(ga, na, na, "ga") }?;
        let gb = unsafe { matrix(gb, nb, nb, "gb") }?;
        let c = unsafe { matrix(c, na, nb, "c") }?;
        *out = mutual_information_det(&ga, &gb, &c)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_a_h(h: f64, out: *mut f64) -> i32 {
    guard(|| {
        *unsafe { out_ref(out, "out") }? = sobolev::a_h_constant(Hurst::new(h)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_r_h_spectral(h: f64, out: *mut f64) -> i32 {
    guard(|| {
        *unsafe { out_ref(out, "out") }? = sobolev::r_h_spectral(Hurst::new(h)?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_riesz_fourier_constant(n: u32, alpha: f64, out: *mut f64) -> i32 {
    guard(|| {
        *unsafe { out_ref(out, "out") }? = sobolev::riesz_fourier_constant(n, alpha)?;
        Ok(())
    })
}

/// Scan between windows around t1 and t2 with `grid_n` points each, over
/// `n_eps` strictly decreasing half-widths. Free with `fl_scan_free`.
#[no_mangle]
pub unsafe extern "C" fn fl_scan_new(
    h: f64,
    t1: f64,
    t2: f64,
    eps: *const f64,
    n_eps: usize,
    grid_n: usize,
    rtol: f64,
    out: *mut *mut FlScanTable,
) -> i32 {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        *out = std::ptr::null_mut();
        let mut cfg = ScanConfig::new(Hurst::new(h)?, t1, t2);
        cfg.eps = unsafe { slice(eps, n_eps, "eps") }?.to_vec();
        cfg.grid_n = grid_n;
        cfg.rtol = rtol;
        let inner = local_independence_scan(&cfg)?;
        *out = Box::into_raw(Box::new(FlScanTable { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_scan_free(table: *mut FlScanTable) {
    if !table.is_null() {
        drop(unsafe { Box::from_raw(table) });
    }
}

unsafe fn table<'a>(p: *const FlScanTable) -> Result<&'a ScanTable, Fail> {
    unsafe { p.as_ref() }.map(|t| &t.inner).ok_or_else(|| null("table"))
}

#[no_mangle]
pub unsafe extern "C" fn fl_scan_row_count(t: *const FlScanTable, out: *mut usize) -> i32 {
    guard(|| {
        let t = unsafe { table(t) }?;
        *unsafe { out_ref(out, "out") }? = t.rows.len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fl_scan_row(t: *const FlScanTable, index: usize, out: *mut FlScanRow) -> i32 {
    guard(|| {
        let t = unsafe { table(t) }?;
        let r = t
            .rows
            .get(index)
            .ok_or_else(|| bad(format!("row {index} out of range (table has {})", t.rows.len())))?;
        *unsafe { out_ref(out, "out") }? = FlScanRow {
            eps: r.eps,
            cos_angle: r.cos_angle,
            mi: mi_f64(r.mi),
            hs_lower: r.hs_lower,
            hs_upper: mi_f64(r.hs_upper),
            hs_norm: r.hs_norm,
            rank_a: r.rank_a,
            rank_b: r.rank_b,
            dim_a: r.dim_a,
            dim_b: r.dim_b,
            cond: r.cond,
            ill_conditioned: r.ill_conditioned,
            skipped: r.skipped,
        };
        Ok(())
    })
}

/// Log-log fit of one `FL_COLUMN_*` against eps, compared with `theory`.
#[no_mangle]
pub unsafe extern "C" fn fl_scan_fit(t: *const FlScanTable, column: i32, theory: f64, out: *mut FlFit) -> i32 {
    guard(|| {
        let t = unsafe { table(t) }?;
        let col = match column {
            FL_COLUMN_COS_ANGLE => Column::CosAngle,
            FL_COLUMN_MI => Column::Mi,
            FL_COLUMN_HS_NORM => Column::HsNorm,
            other => return Err(bad(format!("unknown column {other}"))),
        };
        let f = fit_rows(&t.rows, col, theory, None)?;
        *unsafe { out_ref(out, "out") }? = FlFit {
            slope: f.slope,
            intercept: f.intercept,
            r2: f.r2,
            theory_slope: f.theory_slope,
            theory_gap: f.theory_gap,
            points: f.window.points,
        };
        Ok(())
    })
}

/// Writes the table as CSV to the UTF-8 path.
#[no_mangle]
pub unsafe extern "C" fn fl_scan_write_csv(t: *const FlScanTable, path: *const c_char) -> i32 {
    guard(|| {
        let t = unsafe { table(t) }?;
        if path.is_null() {
            return Err(null("path"));
        }
        let p = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| bad("path is not valid UTF-8"))?;
        let mut f = std::fs::File::create(p).map_err(|e| Fail::Code(FL_IO, format!("cannot create {p}: {e}")))?;
        output::write_scan_csv(t, &mut f)?;
        Ok(())
    })
}
