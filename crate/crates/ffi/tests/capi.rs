use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use formctl_ffi::*;

const EQUILATERAL: &str = r#"{
    "version": 1,
    "formation": {"n": 3, "attachments": [[1, 2]],
        "source": {"kind": "distances", "distances": [2, 2, 2], "orientations": [1]}},
    "initial": {"mode": "explicit", "positions": [[0, 0], [1, 0], [0, 1]]}
}"#;

fn last_error() -> String {
    let p = formctl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn spec_gains_and_simulation_round_trip() {
    let json = CString::new(EQUILATERAL).unwrap();
    let mut spec = ptr::null_mut();
    unsafe {
        assert_eq!(formctl_spec_from_json(json.as_ptr(), &mut spec), FormctlStatus::Ok);
        assert!(formctl_last_error().is_null());
        assert_eq!(formctl_spec_n(spec), 3);
        let mut area = [0.0];
        assert_eq!(formctl_spec_areas(spec, area.as_mut_ptr(), 1), FormctlStatus::Ok);
        assert!((area[0] - 3f64.sqrt()).abs() < 1e-12);

        let mut gains = ptr::null_mut();
        assert_eq!(formctl_gains_recommended(spec, 1.0, 0.1, &mut gains), FormctlStatus::Ok);
        let mut ratio = 0.0;
        assert_eq!(formctl_gains_ratio_of(gains, 3, &mut ratio), FormctlStatus::Ok);
        assert!((ratio - 0.825).abs() < 1e-12);
        assert_eq!(formctl_gains_ratio_of(gains, 2, &mut ratio), FormctlStatus::InvalidArgument);

        let opts = formctl_sim_options_default();
        let xy0 = [0.3, -1.0, 2.5, 0.4, -3.0, 2.0];
        let mut run = ptr::null_mut();
        assert_eq!(
            formctl_simulate(spec, gains, xy0.as_ptr(), xy0.len(), &opts, &mut run),
            FormctlStatus::Ok
        );
        let mut verdict = FormctlVerdict::Diverged;
        assert_eq!(formctl_run_verdict(run, &mut verdict), FormctlStatus::Ok);
        assert_eq!(verdict, FormctlVerdict::ConvergedStrongCongruent);
        let (mut z, mut s) = (1.0, 1.0);
        assert_eq!(formctl_run_max_errors(run, &mut z, &mut s), FormctlStatus::Ok);
        assert!(z < 1e-6 && s < 1e-6);
        let mut fin = [0.0; 6];
        assert_eq!(formctl_run_final_positions(run, fin.as_mut_ptr(), 6), FormctlStatus::Ok);
        assert_eq!(&fin[..2], &xy0[..2]);
        let mut t = 0.0;
        assert_eq!(formctl_run_time_to_threshold(run, &mut t), FormctlStatus::Ok);
        assert!(t > 0.0);

        formctl_run_free(run);
        formctl_gains_free(gains);
        formctl_spec_free(spec);
    }
}

#[test]
fn error_reporting() {
    unsafe {
        let mut spec = ptr::null_mut();
        assert_eq!(formctl_spec_from_json(ptr::null(), &mut spec), FormctlStatus::NullPointer);
        assert!(last_error().contains("json"));

        let bad = CString::new("{\"version\": 1").unwrap();
        assert_eq!(formctl_spec_from_json(bad.as_ptr(), &mut spec), FormctlStatus::Parse);

        let att = [1usize, 2];
        let collinear = [0.0, 0.0, 1.0, 0.0, 2.0, 0.0];
        assert_eq!(
            formctl_spec_from_coordinates(3, att.as_ptr(), collinear.as_ptr(), &mut spec),
            FormctlStatus::InvalidSpec
        );
        assert!(spec.is_null());

        let tri = [0.0, 0.0, 2.0, 0.0, 1.0, 3f64.sqrt()];
        assert_eq!(formctl_spec_from_coordinates(3, att.as_ptr(), tri.as_ptr(), &mut spec), FormctlStatus::Ok);
        let mut gains = ptr::null_mut();
        assert_eq!(formctl_gains_ratio(spec, 1.0, 0.825, &mut gains), FormctlStatus::Ok);
        let opts = formctl_sim_options_default();
        let same = [1.0, 1.0, 1.0, 1.0, 0.0, 3.0];
        let mut run = ptr::null_mut();
        assert_eq!(
            formctl_simulate(spec, gains, same.as_ptr(), 6, &opts, &mut run),
            FormctlStatus::InvalidSpec
        );
        assert!(last_error().contains("collocated"));
        assert_eq!(
            formctl_simulate(spec, gains, same.as_ptr(), 4, &opts, &mut run),
            FormctlStatus::InvalidArgument
        );
        formctl_gains_free(gains);
        formctl_spec_free(spec);
        formctl_spec_free(ptr::null_mut());
    }
}

#[test]
fn scalar_helpers() {
    assert_eq!(formctl_signed_area(0.0, 0.0, 1.0, 0.0, 0.0, 1.0), 0.5);
    assert_eq!(formctl_signed_area(0.0, 0.0, 0.0, 1.0, 1.0, 0.0), -0.5);
    unsafe {
        let mut has = false;
        assert_eq!(formctl_quartic_has_real_root(1.0, 0.0, 0.0, 0.0, 1.0, &mut has), FormctlStatus::Ok);
        assert!(!has);
        assert_eq!(formctl_quartic_has_real_root(1.0, 0.0, 0.0, 0.0, -1.0, &mut has), FormctlStatus::Ok);
        assert!(has);
        let (mut g, mut th) = (0.0, 0.0);
        assert_eq!(formctl_gamma_lower_bound(2.0, 1.9, 2.2, &mut g, &mut th), FormctlStatus::Ok);
        assert_eq!(th, g.max(2.0));
        assert_eq!(formctl_gamma_lower_bound(1.0, 3.0, 2.1, &mut g, &mut th), FormctlStatus::Domain);
        assert_eq!(formctl_gamma_lower_bound(1.0, 3.0, 2.1, ptr::null_mut(), &mut th), FormctlStatus::Domain);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_smoke_test() {
    let lib = target_dir().join("libformctl_ffi.a");
    let have_cc = Command::new("cc").arg("--version").output().is_ok();
    if !have_cc || !lib.exists() {
        eprintln!("skipping C smoke test (cc or {} missing)", lib.display());
        return;
    }
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(root.join("include"))
        .arg(root.join("tests").join("smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C smoke test failed to compile");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
}
