use std::ffi::{CStr, CString};
use std::ptr;

use capflow_ffi::*;

fn last_error() -> String {
    let p = capflow_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    capflow_string_free(s);
    out
}

const CAP_ICF: &str = r#"{
    "kind": "icf",
    "grid": {"n": 2, "n_beta": 40, "theta": 1.5707963267948966},
    "t_max": 0.02,
    "monitor": {"every_steps": 50},
    "initial": {"kind": "cap", "radius": 1.0}
}"#;

#[test]
fn flow_handle_round_trip() {
    let cfg = CString::new(CAP_ICF).unwrap();
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(capflow_run_flow(cfg.as_ptr(), &mut run), CapflowStatus::Ok);
        assert!(!run.is_null());
        let rows = capflow_run_row_count(run);
        assert!(rows >= 2);
        assert_eq!(capflow_run_dimension(run), 2);

        let mut t = f64::NAN;
        let mut w = [0.0; 4];
        assert_eq!(capflow_run_row(run, rows - 1, &mut t, w.as_mut_ptr(), 4), CapflowStatus::Ok);
        assert!((t - 0.02).abs() < 1e-12);
        assert!(w.iter().all(|x| x.is_finite() && *x > 0.0));

        let mut small = [0.0; 3];
        assert_eq!(
            capflow_run_row(run, 0, &mut t, small.as_mut_ptr(), 3),
            CapflowStatus::BufferTooSmall
        );
        assert_eq!(capflow_run_row(run, rows, &mut t, w.as_mut_ptr(), 4), CapflowStatus::Config);
        assert!(last_error().contains("out of range"));

        let mut s = ptr::null_mut();
        assert_eq!(capflow_run_trace_csv(run, &mut s), CapflowStatus::Ok);
        let csv = take(s);
        assert!(csv.starts_with("t,W0,W1,W2,W3,"));
        assert_eq!(csv.lines().count(), rows + 1);

        assert_eq!(capflow_run_summary_json(run, &mut s), CapflowStatus::Ok);
        let summary: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(summary["stop"], "t_max");
        capflow_run_free(run);
    }
}

#[test]
fn bad_config_reports_config_error() {
    let mut run = ptr::null_mut();
    unsafe {
        let cfg = CString::new(CAP_ICF.replace("\"t_max\": 0.02", "\"t_max\": 0.02, \"dt_safety\": 0.0")).unwrap();
        assert_eq!(capflow_run_flow(cfg.as_ptr(), &mut run), CapflowStatus::Config);
        assert!(run.is_null());
        assert!(last_error().contains("dt_safety"));

        let junk = CString::new("{not json").unwrap();
        assert_eq!(capflow_run_flow(junk.as_ptr(), &mut run), CapflowStatus::Config);
        assert_eq!(capflow_run_flow(ptr::null(), &mut run), CapflowStatus::NullPointer);
        assert_eq!(capflow_run_flow(junk.as_ptr(), ptr::null_mut()), CapflowStatus::NullPointer);
        // null handles are tolerated
        capflow_run_free(ptr::null_mut());
        capflow_string_free(ptr::null_mut());
        assert_eq!(capflow_run_row_count(ptr::null()), 0);
    }
}

#[test]
fn cap_quermass_flat_ball() {
    let mut w = [0.0; 5];
    unsafe {
        assert_eq!(
            capflow_cap_quermass(3, std::f64::consts::FRAC_PI_2, f64::INFINITY, 100, w.as_mut_ptr(), 5),
            CapflowStatus::Ok
        );
        assert_eq!(
            capflow_cap_quermass(3, 4.0, 1.0, 100, w.as_mut_ptr(), 5),
            CapflowStatus::Config
        );
    }
    let expect = capflow::quermass::flat_disk_quermass(3);
    // W_1 carries the discretization error of the boundary terms
    for (a, b) in w.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-3, "{a} vs {b}");
    }
}

#[test]
fn verify_suite_outcomes() {
    let mut out = ptr::null_mut();
    unsafe {
        let suite = CString::new("identities").unwrap();
        let cfg = CString::new(r#"{"samples": 500}"#).unwrap();
        assert_eq!(capflow_verify(suite.as_ptr(), cfg.as_ptr(), &mut out), CapflowStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(doc["reports"].as_array().unwrap().len() >= 4);

        let suite = CString::new("af_main").unwrap();
        let cfg = CString::new(
            r#"{"fixtures_only": true, "fixtures": [{"kind": "quermass", "n": 3, "w": [1, 1, 1, 0.1, 2]}]}"#,
        )
        .unwrap();
        assert_eq!(capflow_verify(suite.as_ptr(), cfg.as_ptr(), &mut out), CapflowStatus::CheckFailed);
        assert!(!out.is_null());
        capflow_string_free(out);

        let suite = CString::new("no_such_suite").unwrap();
        assert_eq!(capflow_verify(suite.as_ptr(), ptr::null(), &mut out), CapflowStatus::Config);
        assert!(out.is_null());
    }
}

#[test]
fn pointwise_wrappers() {
    let kappa = [1.0, 2.0, 4.0];
    let mut f = 0.0;
    unsafe {
        assert_eq!(capflow_curvature_function(kappa.as_ptr(), 3, 1, 0, &mut f), CapflowStatus::Ok);
        assert!((f - 7.0 / 3.0).abs() < 1e-14);
        assert_eq!(capflow_curvature_function(kappa.as_ptr(), 3, 3, 0, &mut f), CapflowStatus::Ok);
        assert!((f - 2.0).abs() < 1e-14);
        assert_eq!(capflow_curvature_function(kappa.as_ptr(), 3, 4, 0, &mut f), CapflowStatus::Config);

        let x = [0.3, -0.2, 0.1];
        let mut y = [0.0; 3];
        let mut back = [0.0; 3];
        assert_eq!(capflow_ball_to_halfspace(x.as_ptr(), 3, y.as_mut_ptr()), CapflowStatus::Ok);
        assert_eq!(capflow_halfspace_to_ball(y.as_ptr(), 3, back.as_mut_ptr()), CapflowStatus::Ok);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
        let mut c = 0.0;
        assert_eq!(capflow_conformal_factor(y.as_ptr(), 3, &mut c), CapflowStatus::Ok);
        let d2: f64 = [x[0], x[1], x[2] - 1.0].iter().map(|v| v * v).sum();
        assert!((c * d2 / 2.0 - 1.0).abs() < 1e-12);

        let pole = [0.0, 0.0, 1.0];
        assert_eq!(capflow_ball_to_halfspace(pole.as_ptr(), 3, y.as_mut_ptr()), CapflowStatus::Numerical);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(capflow_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
