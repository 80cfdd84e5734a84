use std::ffi::{CStr, CString};
use std::ptr;

use qse_ffi::*;

fn last_error() -> String {
    let p = qse_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn gate(m: [[(f64, f64); 2]; 2]) -> QseGate {
    let flat = [m[0][0], m[0][1], m[1][0], m[1][1]];
    QseGate { re: flat.map(|c| c.0), im: flat.map(|c| c.1) }
}

fn hadamard() -> QseGate {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    gate([[(h, 0.0), (h, 0.0)], [(h, 0.0), (-h, 0.0)]])
}

fn not() -> QseGate {
    gate([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]])
}

unsafe fn decode(st: *const QseState) -> Vec<(f64, f64)> {
    let n = qse_state_num_amplitudes(st);
    let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(qse_state_decode(st, re.as_mut_ptr(), im.as_mut_ptr(), n), QseStatus::Ok);
    re.into_iter().zip(im).collect()
}

#[test]
fn bell_pair_across_encodings() {
    unsafe {
        let mut st = ptr::null_mut();
        assert_eq!(qse_state_new_basis(1, 1, 0, 0, &mut st), QseStatus::Ok);
        assert_eq!(qse_apply_gate(st, &hadamard(), QseQubitKind::Frequency, 0), QseStatus::Ok);
        assert_eq!(
            qse_apply_controlled(st, &not(), QseQubitKind::Frequency, 0, QseQubitKind::Spatial, 0),
            QseStatus::Ok
        );
        let amps = decode(st);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (k, want) in [(0, h), (1, 0.0), (2, 0.0), (3, h)] {
            assert!((amps[k].0 - want).abs() < 1e-12 && amps[k].1.abs() < 1e-12);
        }
        assert!((qse_state_norm(st) - 1.0).abs() < 1e-12);

        let mut copy = ptr::null_mut();
        assert_eq!(qse_state_clone(st, &mut copy), QseStatus::Ok);
        let mut m = QseMeasurement::default();
        assert_eq!(qse_measure(st, QseQubitKind::Spatial, 0, QsePolicy::Born, 9, &mut m), QseStatus::Ok);
        assert!((m.p1 - 0.5).abs() < 1e-12);
        let (mut f, mut s, mut t) = (9, 9, 9);
        assert_eq!(qse_state_shape(st, &mut f, &mut s, &mut t), QseStatus::Ok);
        assert_eq!((f, s, t), (1, 0, 0));
        let mut m2 = QseMeasurement::default();
        assert_eq!(qse_measure(st, QseQubitKind::Frequency, 0, QsePolicy::Argmax, 0, &mut m2), QseStatus::Ok);
        assert_eq!(m.outcome, m2.outcome);
        assert_eq!(qse_state_num_amplitudes(copy), 4);
        qse_state_free(st);
        qse_state_free(copy);
    }
}

#[test]
fn amplitudes_round_trip() {
    let re = [0.1, -0.2, 0.3, 0.4, 0.0, 0.5, -0.6, 0.7];
    let im = [0.0, 0.3, -0.1, 0.2, 0.9, 0.0, 0.1, -0.4];
    unsafe {
        let mut st = ptr::null_mut();
        assert_eq!(qse_state_from_amplitudes(1, 1, 1, re.as_ptr(), im.as_ptr(), 8, &mut st), QseStatus::Ok);
        let amps = decode(st);
        for k in 0..8 {
            assert!((amps[k].0 - re[k]).abs() < 1e-12 && (amps[k].1 - im[k]).abs() < 1e-12);
        }
        let (mut r, mut i) = ([0.0; 4], [0.0; 4]);
        assert_eq!(qse_state_decode(st, r.as_mut_ptr(), i.as_mut_ptr(), 4), QseStatus::BufferTooSmall);
        qse_state_free(st);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut st = ptr::null_mut();
        assert_eq!(qse_state_new_basis(0, 0, 0, 0, &mut st), QseStatus::InvalidArgument);
        assert!(st.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(qse_state_new_basis(2, 0, 0, 0, ptr::null_mut()), QseStatus::NullPointer);
        assert!(last_error().contains("out"));
        assert_eq!(qse_state_new_basis(2, 0, 0, 0, &mut st), QseStatus::Ok);
        assert_eq!(qse_apply_gate(st, &hadamard(), QseQubitKind::Time, 0), QseStatus::InvalidArgument);
        let bad = gate([[(f64::NAN, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]]);
        assert_eq!(qse_apply_gate(st, &bad, QseQubitKind::Frequency, 0), QseStatus::InvalidArgument);
        assert_eq!(
            qse_apply_gate(ptr::null_mut(), &hadamard(), QseQubitKind::Frequency, 0),
            QseStatus::NullPointer
        );
        assert_eq!(qse_add_noise(st, f64::NAN, 1), QseStatus::InvalidArgument);
        assert_eq!(qse_state_num_amplitudes(ptr::null()), 0);
        assert!(qse_state_norm(ptr::null()).is_nan());
        qse_state_free(st);
        qse_state_free(ptr::null_mut());
    }
}

#[test]
fn oracle_and_search() {
    let table: Vec<u8> = (0..16).map(|x| u8::from(x == 3 || x == 12)).collect();
    unsafe {
        let mut sols = [0usize; 4];
        let mut found = 0;
        let s = qse_search(table.as_ptr(), 4, f64::INFINITY, 0, sols.as_mut_ptr(), 4, &mut found);
        assert_eq!(s, QseStatus::Ok);
        assert_eq!(&sols[..found], &[3, 12]);
        let s = qse_search(table.as_ptr(), 4, f64::INFINITY, 0, sols.as_mut_ptr(), 1, &mut found);
        assert_eq!(s, QseStatus::BufferTooSmall);
        assert_eq!(found, 2);
        let mut count = 0;
        assert_eq!(qse_count_solutions(table.as_ptr(), 4, 40.0, 1, &mut count), QseStatus::Ok);
        assert_eq!(count, 2);

        // x = 3 on inputs f1..f4, output f0 = 0
        let mut st = ptr::null_mut();
        assert_eq!(qse_state_new_basis(5, 0, 0, 3 << 1, &mut st), QseStatus::Ok);
        assert_eq!(qse_apply_oracle(st, table.as_ptr(), 4), QseStatus::Ok);
        let amps = decode(st);
        assert!((amps[(3 << 1) | 1].0 - 1.0).abs() < 1e-12);
        assert_eq!(qse_apply_oracle(st, table.as_ptr(), 3), QseStatus::InvalidArgument);
        qse_state_free(st);
    }
}

#[test]
fn run_program_returns_json_report() {
    let prog = CString::new("qubits f=2\ngate H f1\ncgate X f1 f0\nmeasure all\n").unwrap();
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(qse_run_program(prog.as_ptr(), QseBackend::Both, 4, &mut report), QseStatus::Ok);
        let text = CStr::from_ptr(report).to_str().unwrap().to_owned();
        qse_string_free(report);
        assert!(text.contains("\"measurements\""));
        assert!(text.contains("\"max_deviation\""));

        let bad = CString::new("qubits f=2\ngate H f7\n").unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(qse_run_program(bad.as_ptr(), QseBackend::Signal, 0, &mut none), QseStatus::ParseError);
        assert!(none.is_null());
        assert!(last_error().starts_with("line 2"));
    }
    let v = unsafe { CStr::from_ptr(qse_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qse.h")).unwrap();
    for name in [
        "qse_last_error",
        "qse_version",
        "qse_state_new_basis",
        "qse_state_from_amplitudes",
        "qse_state_clone",
        "qse_state_free",
        "qse_state_decode",
        "qse_apply_gate",
        "qse_apply_controlled",
        "qse_apply_oracle",
        "qse_add_noise",
        "qse_measure",
        "qse_run_program",
        "qse_string_free",
        "qse_search",
        "qse_count_solutions",
        "typedef struct QseState QseState",
        "QSE_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name} missing from qse.h");
    }
}
