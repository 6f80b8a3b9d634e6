use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fbm_local.h")).unwrap()
}

#[test]
fn header_declares_the_abi() {
    let h = header();
    for sym in [
        "fl_fbm_cov",
        "fl_increment_cov",
        "fl_levy_fbm_cov",
        "fl_gram",
        "fl_cross_gram",
        "fl_spectrum_new",
        "fl_spectrum_free",
        "fl_spectrum_len",
        "fl_spectrum_sigmas",
        "fl_spectrum_info",
        "fl_spectrum_cos_angle",
        "fl_spectrum_mi",
        "fl_mutual_information_det",
        "fl_a_h",
        "fl_r_h_spectral",
        "fl_riesz_fourier_constant",
        "fl_scan_new",
        "fl_scan_free",
        "fl_scan_row_count",
        "fl_scan_row",
        "fl_scan_fit",
        "fl_scan_write_csv",
        "fl_version",
        "fl_last_error",
    ] {
        assert!(h.contains(&format!("{sym}(")), "missing {sym}");
    }
    assert!(h.contains("typedef struct FlSpectrum FlSpectrum;"));
    assert!(h.contains("typedef struct FlScanTable FlScanTable;"));
    assert!(h.contains("#define FL_PANIC 6"));
}

/// Directory holding the built library: target/<profile>.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = lib_dir();
    let archive = lib.join("libfbm_local_ffi.a");
    assert!(archive.exists(), "static library not found at {}", archive.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
