//! Exercise the C ABI from Rust: handle lifecycle, out-pointer writes,
//! status codes, and agreement with the reference values.

use telesim_ffi::*;

#[test]
fn version_is_a_nul_terminated_string() {
    let ptr = ts_version();
    let s = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
    assert!(!s.is_empty());
}

#[test]
fn channel_state_lifecycle_and_negativity() {
    unsafe {
        let mut state: *mut TsState = std::ptr::null_mut();
        let status = ts_channel_state(TsChannel::Dephasing, 0.1, 10.0, &mut state);
        assert_eq!(status, TsStatus::Ok);
        assert!(!state.is_null());

        let mut dim = 0usize;
        assert_eq!(ts_state_dim(state, &mut dim), TsStatus::Ok);
        assert_eq!(dim, 4);

        let (mut re, mut im) = (0.0f64, 0.0f64);
        assert_eq!(ts_state_entry(state, 1, 2, &mut re, &mut im), TsStatus::Ok);
        assert!((re + 0.5 * (-2.0f64).exp()).abs() < 1e-12);
        assert!(im.abs() < 1e-12);
        assert_eq!(
            ts_state_entry(state, 4, 0, &mut re, &mut im),
            TsStatus::InvalidArgument
        );

        let mut neg = 0.0f64;
        assert_eq!(ts_state_negativity(state, &mut neg), TsStatus::Ok);
        assert!((neg - (-2.0f64).exp()).abs() < 1e-10);

        ts_state_free(state);
        ts_state_free(std::ptr::null_mut());
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(
            ts_channel_state(TsChannel::Ideal, 0.0, 0.0, std::ptr::null_mut()),
            TsStatus::NullPointer
        );
        let mut out = 0.0f64;
        assert_eq!(
            ts_state_negativity(std::ptr::null(), &mut out),
            TsStatus::NullPointer
        );
        assert_eq!(ts_tau_d(0.1, std::ptr::null_mut()), TsStatus::NullPointer);
    }
}

#[test]
fn closed_forms_and_simulation_agree_over_the_abi() {
    unsafe {
        let mut sim = 0.0f64;
        let mut closed = 0.0f64;
        let status = ts_average_fidelity(
            TsChannel::Ideal,
            0.1,
            0.0,
            TsRecovery::Intrinsic,
            1.0,
            std::f64::consts::PI,
            &mut sim,
        );
        assert_eq!(status, TsStatus::Ok);
        let status = ts_fav_closed(
            TsChannel::Ideal,
            TsRecovery::Intrinsic,
            0.1,
            1.0,
            std::f64::consts::PI,
            0.0,
            &mut closed,
        );
        assert_eq!(status, TsStatus::Ok);
        assert!((sim - closed).abs() < 1e-8);
        assert!((sim - 0.88337).abs() < 1e-5);
    }
}

#[test]
fn invalid_parameters_return_invalid_argument() {
    unsafe {
        let mut out = 0.0f64;
        assert_eq!(ts_tau_d(-1.0, &mut out), TsStatus::InvalidArgument);
        assert_eq!(ts_tau_prime(0.0, 0.1, &mut out), TsStatus::InvalidArgument);
        assert_eq!(
            ts_average_fidelity(
                TsChannel::Ideal,
                -0.5,
                0.0,
                TsRecovery::Perfect,
                1.0,
                0.0,
                &mut out
            ),
            TsStatus::InvalidArgument
        );
    }
}

#[test]
fn uncovered_closed_form_reports_solver_failure() {
    unsafe {
        let mut out = 0.0f64;
        let status = ts_fav_closed(
            TsChannel::Combined,
            TsRecovery::Intrinsic,
            0.1,
            1.0,
            1.0,
            1.0,
            &mut out,
        );
        assert_eq!(status, TsStatus::SolverFailure);
    }
}

#[test]
fn tau_values_round_trip() {
    unsafe {
        let (mut tau, mut tau_p) = (0.0f64, 0.0f64);
        assert_eq!(ts_tau_d(0.1, &mut tau), TsStatus::Ok);
        assert!((tau - 4.40687).abs() < 1e-5);
        assert_eq!(ts_tau_prime(1.0, 0.1, &mut tau_p), TsStatus::Ok);
        assert!((tau_p - tau / 2.0).abs() < 1e-12);
    }
}

#[test]
fn two_qubit_branch_over_the_abi() {
    unsafe {
        let (mut fid, mut neg) = (0.0f64, 0.0f64);
        let status = ts_teleport_two(
            TsChannel::Dephasing,
            0.1,
            2.0,
            TsRecovery::Perfect,
            0.0,
            0.0,
            std::f64::consts::FRAC_PI_4,
            0,
            0,
            &mut fid,
            &mut neg,
        );
        assert_eq!(status, TsStatus::Ok);
        let e4 = (-4.0 * 0.1 * 2.0f64).exp();
        assert!((neg - e4).abs() < 1e-8);
        assert!((fid - (1.0 - 0.5 * (1.0 - e4))).abs() < 1e-8);
        assert_eq!(
            ts_teleport_two(
                TsChannel::Dephasing,
                0.1,
                2.0,
                TsRecovery::Perfect,
                0.0,
                0.0,
                std::f64::consts::FRAC_PI_4,
                5,
                0,
                &mut fid,
                &mut neg
            ),
            TsStatus::InvalidArgument
        );
    }
}

#[test]
fn generated_header_exists_and_exports_the_api() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/telesim.h");
    let text = std::fs::read_to_string(header).expect("header must be generated at build time");
    for symbol in [
        "ts_version",
        "ts_channel_state",
        "ts_state_negativity",
        "ts_state_free",
        "ts_average_fidelity",
        "ts_critical_omega",
        "ts_teleport_two",
        "TsStatus",
        "TsChannel",
        "TsRecovery",
    ] {
        assert!(text.contains(symbol), "header must declare {symbol}");
    }
}
