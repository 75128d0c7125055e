use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hardy_forge_ffi::*;

fn last_error() -> String {
    let p = hf_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { hf_string_free(p) };
    s
}

#[test]
fn radial_weight_handle_roundtrip() {
    let spec = CString::new("zero").unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { hf_radial_weight_new(3, spec.as_ptr(), 1e-6, 1e6, 2001, &mut h) };
    assert_eq!(st, HfStatus::Ok);
    let len = unsafe { hf_radial_weight_len(h) };
    assert_eq!(len, 2001);
    let (mut r, mut w) = (vec![0.0; len], vec![0.0; len]);
    assert_eq!(unsafe { hf_radial_weight_samples(h, r.as_mut_ptr(), w.as_mut_ptr(), len) }, HfStatus::Ok);
    for (r, w) in r.iter().zip(&w) {
        assert!((w * r * r - 0.25).abs() < 1e-10);
    }
    let mut v = 0.0;
    assert_eq!(unsafe { hf_radial_weight_eval(h, 2.0, &mut v) }, HfStatus::Ok);
    assert!((v - 0.0625).abs() < 1e-9);
    assert!(unsafe { hf_radial_weight_consistency(h) } < 1e-6);
    assert_eq!(unsafe { hf_radial_weight_samples(h, r.as_mut_ptr(), w.as_mut_ptr(), 3) }, HfStatus::InvalidInput);
    assert_eq!(unsafe { hf_radial_weight_eval(h, 1e9, &mut v) }, HfStatus::OutsideGrid);
    unsafe { hf_radial_weight_free(h) };
}

#[test]
fn errors_are_reported() {
    let spec = CString::new("zero").unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { hf_radial_weight_new(1, spec.as_ptr(), 1e-6, 1e6, 101, &mut h) };
    assert_eq!(st, HfStatus::InvalidInput);
    assert!(h.is_null());
    assert!(last_error().contains("dimension must be ≥ 2"));

    let bad = CString::new("cubic:1").unwrap();
    assert_eq!(unsafe { hf_radial_weight_new(3, bad.as_ptr(), 1e-6, 1e6, 101, &mut h) }, HfStatus::Config);
    assert_eq!(unsafe { hf_radial_weight_new(3, ptr::null(), 1e-6, 1e6, 101, &mut h) }, HfStatus::NullPointer);
    assert_eq!(
        unsafe { hf_radial_weight_new(3, spec.as_ptr(), 1e-6, 1e6, 101, ptr::null_mut()) },
        HfStatus::NullPointer
    );
    assert_eq!(unsafe { hf_radial_weight_len(ptr::null()) }, 0);
    unsafe { hf_radial_weight_free(ptr::null_mut()) };
    unsafe { hf_string_free(ptr::null_mut()) };
}

#[test]
fn success_clears_last_error() {
    let spec = CString::new("zero").unwrap();
    let mut h = ptr::null_mut();
    unsafe { hf_radial_weight_new(1, spec.as_ptr(), 1e-6, 1e6, 101, &mut h) };
    assert!(unsafe { hf_radial_weight_new(3, spec.as_ptr(), 1e-3, 1e3, 101, &mut h) } == HfStatus::Ok);
    assert!(hf_last_error().is_null());
    unsafe { hf_radial_weight_free(h) };
}

#[test]
fn battery_json() {
    let cfg = CString::new("subcommand = \"radial\"\nn = 3\n").unwrap();
    let (mut json, mut pass) = (ptr::null_mut(), -1);
    let st = unsafe { hf_run_battery(cfg.as_ptr(), ptr::null(), -1, &mut json, &mut pass) };
    assert_eq!(st, HfStatus::Ok);
    assert_eq!(pass, 1);
    let text = unsafe { CStr::from_ptr(json) }.to_string_lossy().into_owned();
    unsafe { hf_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["seed"], 42);

    let sub = CString::new("verify").unwrap();
    let st = unsafe { hf_run_battery(cfg.as_ptr(), sub.as_ptr(), 7, &mut json, &mut pass) };
    assert_eq!(st, HfStatus::Config);
    assert!(json.is_null());
}

#[test]
fn version_and_constant() {
    let v = unsafe { CStr::from_ptr(hf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    assert_eq!(hf_hardy_constant(3), 0.25);
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hardy_forge.h")).unwrap();
    for name in [
        "hf_version",
        "hf_last_error",
        "hf_string_free",
        "hf_hardy_constant",
        "hf_radial_weight_new",
        "hf_radial_weight_free",
        "hf_radial_weight_len",
        "hf_radial_weight_eval",
        "hf_radial_weight_samples",
        "hf_radial_weight_consistency",
        "hf_run_battery",
        "typedef struct HfRadialWeight HfRadialWeight",
        "HF_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles the C example against the header and static library, when a C compiler is present.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("cc not found, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libhardy_forge_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hf_weight_demo");
    let status = Command::new("cc")
        .arg(manifest.join("examples/c/weight.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<String> = String::from_utf8_lossy(&out.stdout).lines().map(String::from).collect();
    assert_eq!(lines, ["0.250000000000", "0.250000000000", "0.250000000000", "2"]);
}
