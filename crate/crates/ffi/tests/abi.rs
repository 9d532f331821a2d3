use std::ffi::CStr;
use std::ptr;

use quantum_battery_ffi::*;

fn params(wb: f64, wc: f64, j1: f64, j2: f64) -> *mut QbParams {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { qb_params_new(wb, wc, j1, j2, &mut p) },
        QbStatus::Ok
    );
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let msg = qb_last_error_message();
    assert!(!msg.is_null());
    unsafe { CStr::from_ptr(msg) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn capacity_at_start() {
    let p = params(1.0, 1.0, 0.1, 0.1);
    let mut r = QbCapacityReport::default();
    assert_eq!(unsafe { qb_capacity_report(p, 0.0, &mut r) }, QbStatus::Ok);
    assert!((r.battery - 2.0).abs() < 1e-12);
    assert!((r.charger - 2.0).abs() < 1e-12);
    assert!((r.total - 4.0).abs() < 1e-12);
    assert!(r.residual.abs() < 1e-12);
    unsafe { qb_params_free(p) };
}

#[test]
fn invalid_params_report_status_and_message() {
    let mut p = ptr::null_mut();
    let status = unsafe { qb_params_new(-1.0, 1.0, 0.1, 0.1, &mut p) };
    assert_eq!(status, QbStatus::InvalidParams);
    assert!(p.is_null());
    assert!(last_error().contains("omega_b"));
}

#[test]
fn null_arguments_are_rejected() {
    assert_eq!(
        unsafe { qb_params_new(1.0, 1.0, 0.1, 0.1, ptr::null_mut()) },
        QbStatus::NullPointer
    );
    let mut r = QbCapacityReport::default();
    assert_eq!(
        unsafe { qb_capacity_report(ptr::null(), 0.0, &mut r) },
        QbStatus::NullPointer
    );
    assert_eq!(unsafe { qb_trajectory_len(ptr::null()) }, 0);
    assert!(!unsafe { qb_verification_all_pass(ptr::null()) });
    unsafe {
        qb_params_free(ptr::null_mut());
        qb_trajectory_free(ptr::null_mut());
        qb_verification_free(ptr::null_mut());
    }
}

#[test]
fn status_messages_are_static() {
    for s in [QbStatus::Ok, QbStatus::NullPointer, QbStatus::Panic] {
        let m = unsafe { CStr::from_ptr(qb_status_message(s)) };
        assert!(!m.to_bytes().is_empty());
    }
}

#[test]
fn dephased_resources() {
    let p = params(1.0, 1.0, 0.1, 0.1);
    let t = std::f64::consts::PI / 0.4;
    let mut clean = QbResourceReport::default();
    let mut noisy = QbResourceReport::default();
    assert_eq!(
        unsafe { qb_resources(p, t, -1.0, &mut clean) },
        QbStatus::Ok
    );
    assert_eq!(
        unsafe { qb_resources(p, t, 0.25, &mut noisy) },
        QbStatus::Ok
    );
    assert!((clean.concurrence - 1.0).abs() < 1e-12);
    assert!((noisy.concurrence - 0.25).abs() < 1e-12);
    assert!((noisy.texture_tr - clean.texture_tr).abs() < 1e-12);
    assert_eq!(
        unsafe { qb_resources(p, t, 2.0, &mut noisy) },
        QbStatus::GammaOutOfRange
    );
    unsafe { qb_params_free(p) };
}

#[test]
fn trajectory_samples() {
    let p = params(1.0, 1.0, 0.1, 0.1);
    let mut traj = ptr::null_mut();
    assert_eq!(
        unsafe { qb_trajectory_integrate(p, 50.0, 1000, &mut traj) },
        QbStatus::Ok
    );
    assert_eq!(unsafe { qb_trajectory_len(traj) }, 1000);
    let (mut t, mut c) = (0.0, 0.0);
    assert_eq!(
        unsafe { qb_trajectory_sample(traj, 500, &mut t, &mut c) },
        QbStatus::Ok
    );
    assert!((t - 500.0 * 50.0 / 999.0).abs() < 1e-12);
    assert!((c - 0.5769161).abs() < 1e-6);
    assert_eq!(
        unsafe { qb_trajectory_sample(traj, 1000, &mut t, &mut c) },
        QbStatus::OutOfBounds
    );
    assert!(last_error().contains("1000"));

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { qb_trajectory_integrate(p, 50.0, 1, &mut bad) },
        QbStatus::InvalidConfig
    );
    unsafe {
        qb_trajectory_free(traj);
        qb_params_free(p);
    }
}

#[test]
fn verification_suite() {
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { qb_verify_all(42, &mut v) }, QbStatus::Ok);
    let n = unsafe { qb_verification_len(v) };
    assert_eq!(n, 17);
    let mut names = Vec::new();
    for i in 0..n {
        let mut rec = QbVerdict {
            name: ptr::null(),
            samples: 0,
            max_residual: 0.0,
            tolerance: 0.0,
            pass: false,
        };
        assert_eq!(unsafe { qb_verification_get(v, i, &mut rec) }, QbStatus::Ok);
        assert!(rec.pass);
        names.push(
            unsafe { CStr::from_ptr(rec.name) }
                .to_str()
                .unwrap()
                .to_string(),
        );
    }
    assert_eq!(names[0], "thm1_entanglement");
    assert_eq!(names[16], "appB_family");
    assert!(unsafe { qb_verification_all_pass(v) });
    unsafe { qb_verification_free(v) };
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/quantum_battery.h");
    for f in [
        "qb_status_message",
        "qb_last_error_message",
        "qb_params_new",
        "qb_params_free",
        "qb_capacity_report",
        "qb_resources",
        "qb_trajectory_integrate",
        "qb_trajectory_len",
        "qb_trajectory_sample",
        "qb_trajectory_free",
        "qb_verify_all",
        "qb_verification_len",
        "qb_verification_get",
        "qb_verification_all_pass",
        "qb_verification_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct QbParams QbParams;"));
}
