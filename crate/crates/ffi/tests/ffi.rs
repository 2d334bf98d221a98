use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use dsgibbs::chain::{self, ChainParams};
use dsgibbs::counts::{self, BoxModel};
use dsgibbs::geometry::Observations;
use dsgibbs::oracle;
use dsgibbs::rng::SeedSplitter;
use dsgibbs_ffi::*;

fn last_error() -> String {
    let p = dsg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(dsg_version()) };
    assert_eq!(v.to_str().unwrap(), dsgibbs::VERSION);
}

#[test]
fn chain_handle_lifecycle() {
    unsafe {
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(dsg_chain_new(2, 3, 0.25, 9, &mut a), DSG_OK);
        assert_eq!(dsg_chain_new(2, 3, 0.25, 9, &mut b), DSG_OK);
        let (mut za, mut zb) = (0.0, 0.0);
        assert_eq!(dsg_chain_step(a, 17, &mut za), DSG_OK);
        for _ in 0..17 {
            assert_eq!(dsg_chain_step(b, 1, ptr::null_mut()), DSG_OK);
        }
        let mut t = 0u64;
        assert_eq!(dsg_chain_state(b, &mut zb, &mut t), DSG_OK);
        assert_eq!((za, t), (zb, 17));
        assert!((0.0..=1.0).contains(&za));
        dsg_chain_free(a);
        dsg_chain_free(b);
        dsg_chain_free(ptr::null_mut());
    }
}

#[test]
fn argument_errors_set_message() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(
            dsg_chain_new(1, 1, 1.5, 0, &mut c),
            DSG_ERR_INVALID_ARGUMENT
        );
        assert!(c.is_null());
        assert!(last_error().contains("1.5"), "{}", last_error());
        assert_eq!(
            dsg_chain_new(0, 1, 0.5, 0, &mut c),
            DSG_ERR_INVALID_ARGUMENT
        );
        assert_eq!(
            dsg_chain_new(1, 1, 0.5, 0, ptr::null_mut()),
            DSG_ERR_NULL_POINTER
        );
        assert!(last_error().contains("out_chain"));
        assert_eq!(
            dsg_chain_step(ptr::null_mut(), 1, ptr::null_mut()),
            DSG_ERR_NULL_POINTER
        );
        let mut v = 0.0;
        assert_eq!(
            dsg_beta_cdf(2.0, 1.0, 1.5, &mut v),
            DSG_ERR_INVALID_ARGUMENT
        );
        assert_eq!(dsg_birthday(365, 23, 7, &mut v), DSG_ERR_INVALID_ARGUMENT);
        assert_eq!(
            dsg_birthday(0, 23, DSG_METHOD_CLASSICAL, &mut v),
            DSG_ERR_INVALID_ARGUMENT
        );
    }
}

#[test]
fn report_matches_library() {
    let p = ChainParams::new(2, 3).unwrap();
    let want = chain::run_trajectories(p, 0.0, 8, 500, 42, false).unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(dsg_report_run(2, 3, 0.0, 8, 500, 42, &mut r), DSG_OK);
        let mut len = 0usize;
        assert_eq!(dsg_report_len(r, &mut len), DSG_OK);
        assert_eq!(len, 9);
        for (i, s) in want.summary.iter().enumerate() {
            let mut row = DsgStepSummary::default();
            assert_eq!(dsg_report_row(r, i, &mut row), DSG_OK);
            assert_eq!(row.t, s.t);
            assert_eq!(row.sample_mean, s.sample_mean);
            assert_eq!(row.empirical_w1, s.empirical_w1);
            assert_eq!(row.w1_upper, s.w1_upper);
        }
        let mut row = DsgStepSummary::default();
        assert_eq!(dsg_report_row(r, 9, &mut row), DSG_ERR_INVALID_ARGUMENT);

        let mut json = ptr::null_mut();
        assert_eq!(dsg_report_to_json(r, &mut json), DSG_OK);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        dsg_string_free(json);
        let parsed: chain::SimulationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, want);
        dsg_report_free(r);

        assert_eq!(
            dsg_report_run(2, 3, 0.0, 8, 0, 42, &mut r),
            DSG_ERR_INVALID_ARGUMENT
        );
    }
}

#[test]
fn closed_forms_match_library() {
    let p = ChainParams::new(1, 1).unwrap();
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(dsg_expected_value_at(1, 1, 1, 0.0, &mut v), DSG_OK);
        assert_eq!(v, 0.5);
        assert_eq!(dsg_w1_lower_bound(1, 1, 2, 0.0, &mut v), DSG_OK);
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(dsg_w1_upper_bound(1, 1, 0, 1.0, &mut v), DSG_OK);
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(dsg_worst_case_w1(1, 1, 1, &mut v), DSG_OK);
        assert_eq!(v, chain::worst_case_w1(p, 1));
        assert_eq!(dsg_beta_cdf(2.0, 1.0, 0.5, &mut v), DSG_OK);
        assert!((v - 0.25).abs() < 1e-15);
        assert_eq!(dsg_beta_kth_moment(3.0, 2.0, 2, &mut v), DSG_OK);
        assert!((v - 0.4).abs() < 1e-15);
        assert_eq!(dsg_beta_w1_to_point(1.0, 1.0, 0.0, &mut v), DSG_OK);
        assert_eq!(v, 0.5);
        assert_eq!(
            dsg_beta_w1_to_point(1.0, 1.0, 0.0, ptr::null_mut()),
            DSG_ERR_NULL_POINTER
        );
    }
}

#[test]
fn oracle_buffer_matches_library() {
    let obs = Observations::from_counts(&[2, 1]).unwrap();
    let want =
        oracle::stationary_endpoint_samples(&obs, 300, &SeedSplitter::new(5), 1_000_000).unwrap();
    let mut buf = vec![0.0; 300];
    let mut attempts = 0u64;
    unsafe {
        assert_eq!(
            dsg_oracle_endpoints(2, 1, 300, 5, 1_000_000, buf.as_mut_ptr(), &mut attempts),
            DSG_OK
        );
        assert_eq!(buf, want.values);
        assert_eq!(attempts, want.attempts);
        assert_eq!(
            dsg_oracle_endpoints(6, 6, 10, 5, 20, buf.as_mut_ptr(), ptr::null_mut()),
            DSG_ERR_SAMPLING_BUDGET
        );
        assert!(last_error().contains("rate"));
        assert_eq!(
            dsg_oracle_endpoints(1, 1, 10, 5, 20, ptr::null_mut(), ptr::null_mut()),
            DSG_ERR_NULL_POINTER
        );
    }
}

#[test]
fn counts_match_library() {
    let mut v = 0.0;
    let mut se = -1.0;
    unsafe {
        assert_eq!(dsg_birthday(365, 23, DSG_METHOD_CLASSICAL, &mut v), DSG_OK);
        assert_eq!(
            v,
            counts::birthday_prob_classical(BoxModel::new(365, 23).unwrap())
        );
        assert_eq!(dsg_birthday(365, 16, DSG_METHOD_FLAT_PRIOR, &mut v), DSG_OK);
        assert!(v > 0.5 && v < 0.55);
        assert_eq!(
            dsg_coupon(365, 2287, DSG_METHOD_CLASSICAL, 0, 0, &mut v, &mut se),
            DSG_OK
        );
        assert!(v > 0.49 && v < 0.51 && se == 0.0);
        assert_eq!(
            dsg_coupon(2, 2, DSG_METHOD_FLAT_PRIOR, 0, 0, &mut v, ptr::null_mut()),
            DSG_OK
        );
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            dsg_coupon(2, 2, DSG_METHOD_FLAT_PRIOR, 20_000, 3, &mut v, &mut se),
            DSG_OK
        );
        assert!((v - 1.0 / 3.0).abs() <= 3.0 * se && se > 0.0);
    }
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    std::env::current_exe()
        .unwrap()
        .parent()
        .and_then(Path::parent)
        .unwrap()
        .to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "dsgibbs.h"

int main(void) {
    DsgChain *c = NULL;
    double z = -1.0, p = -1.0;
    if (dsg_chain_new(1, 1, 0.0, 7, &c) != DSG_OK) return 1;
    if (dsg_chain_step(c, 5, &z) != DSG_OK) return 2;
    dsg_chain_free(c);
    if (dsg_birthday(365, 23, DSG_METHOD_CLASSICAL, &p) != DSG_OK) return 3;
    if (dsg_chain_new(1, 1, 2.0, 7, &c) != DSG_ERR_INVALID_ARGUMENT) return 4;
    printf("%s %.6f %d\n", dsg_version(), p, z >= 0.0 && z <= 1.0);
    return dsg_last_error_message() == NULL ? 5 : 0;
}
"#,
    )
    .unwrap();
    let check = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(
        check.status.success(),
        "{}",
        String::from_utf8_lossy(&check.stderr)
    );

    let lib_dir = target_dir();
    let so = lib_dir.join("libdsgibbs_ffi.so");
    if !so.exists() {
        eprintln!("skipping link step: {} not built", so.display());
        return;
    }
    let exe = dir.path().join("smoke");
    let build = Command::new(&cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-o")
        .arg(&exe)
        .arg(format!("-L{}", lib_dir.display()))
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-ldsgibbs_ffi")
        .output()
        .unwrap();
    assert!(
        build.status.success(),
        "{}",
        String::from_utf8_lossy(&build.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let want = format!("{} 0.492703 1\n", dsgibbs::VERSION);
    assert_eq!(String::from_utf8(run.stdout).unwrap(), want);
}
