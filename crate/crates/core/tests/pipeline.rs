//! Cross-module checks: simulated pipeline against derived spot values,
//! extremum machinery against the printed stationarity solutions, and the
//! sensitivity of the reference tables to the idle-rule reading.

use telesim::acceptance;
use telesim::analysis;
use telesim::channels::{ChannelKind, ChannelSpec};
use telesim::closed_forms::{self, ScenarioId};
use telesim::error::Error;
use telesim::linalg::pauli;
use telesim::lindblad::{self, LindbladModel};
use telesim::teleport::{
    average_fidelity, fidelity_curve, teleport_single, IdleRule, PureQubit, RecoveryKind,
    RecoverySpec,
};
use telesim::tol::{SEARCH, TOL};

const PI: f64 = std::f64::consts::PI;

#[test]
fn intrinsic_fidelity_at_t_pi_matches_derived_value() {
    // (3 + exp(-0.2 pi))/4, by direct substitution.
    let expected = (3.0 + (-0.2 * PI).exp()) / 4.0;
    assert!((expected - 0.88337).abs() < 1e-5);
    let rec = RecoverySpec::noisy(RecoveryKind::Intrinsic, 1.0, 0.1, PI).unwrap();
    let sim = average_fidelity(&ChannelSpec::ideal(), &rec).unwrap();
    assert!(
        (sim - expected).abs() < 1e-8,
        "sim {sim} vs derived {expected}"
    );
}

#[test]
fn perfect_recovery_fidelity_follows_channel_negativity() {
    // (2 + exp(-2 gamma t0))/3 for the dephased channel.
    for &t0 in &[0.5, 2.0, 10.0] {
        let spec = ChannelSpec::new(ChannelKind::Dephasing, 0.1, t0).unwrap();
        let sim = average_fidelity(&spec, &RecoverySpec::perfect()).unwrap();
        let expected = (2.0 + (-0.2 * t0).exp()) / 3.0;
        assert!((sim - expected).abs() < 1e-9);
    }
}

#[test]
fn first_maximum_of_simulated_intrinsic_curve() {
    // t* = pi - atan(2 gamma / omega0), f* from the printed curve.
    let (gamma, omega0) = (0.1, 1.0);
    let channel = ChannelSpec::ideal();
    let f = |t: f64| {
        let rec = RecoverySpec::noisy(RecoveryKind::Intrinsic, omega0, gamma, t).unwrap();
        average_fidelity(&channel, &rec).unwrap()
    };
    let (t_star, f_star) =
        analysis::first_maximum(f, 4.0 * PI / omega0, 0.005 / omega0, SEARCH.first_max_tol)
            .unwrap();
    let t_expected = closed_forms::first_max_time_intrinsic(gamma, omega0);
    assert!(
        (t_star - t_expected).abs() < 1e-6,
        "t* {t_star} vs {t_expected}"
    );
    assert!((t_star - 2.94420).abs() < 1e-5);
    let f_expected = closed_forms::fav_closed(&ScenarioId::single(
        ChannelKind::Ideal,
        RecoveryKind::Intrinsic,
        gamma,
        omega0,
        t_expected,
        0.0,
    ))
    .unwrap();
    assert!((f_star - f_expected).abs() < 1e-8);
}

#[test]
fn noiseless_intrinsic_maximum_is_perfect() {
    // gamma = 0: first maximum at pi/omega0 with fidelity 1.
    let omega0 = 1.3;
    let channel = ChannelSpec::ideal();
    let f = |t: f64| {
        let rec = RecoverySpec::noisy(RecoveryKind::Intrinsic, omega0, 0.0, t).unwrap();
        average_fidelity(&channel, &rec).unwrap()
    };
    let (t_star, f_star) =
        analysis::first_maximum(f, 4.0 * PI / omega0, 0.005 / omega0, SEARCH.first_max_tol)
            .unwrap();
    assert!((t_star - PI / omega0).abs() < 1e-6);
    assert!((f_star - 1.0).abs() < 1e-9);
}

#[test]
fn intrinsic_first_maximum_beats_two_thirds_plus_one_twelfth() {
    for &omega0 in &[0.5, 1.0, 2.0] {
        let phi = analysis::phi_max_simulated(RecoveryKind::Intrinsic, 0.1, 0.0, omega0).unwrap();
        assert!(
            phi > 2.0 / 3.0 + 1.0 / 12.0 - 1e-9,
            "phi_max {phi} at omega0 = {omega0} fails the 3/4 bound"
        );
    }
}

#[test]
fn critical_omega_monotone_consistency() {
    for alpha in [
        RecoveryKind::Intrinsic,
        RecoveryKind::Dephasing,
        RecoveryKind::BitFlip,
    ] {
        let solved = analysis::critical_omega(alpha, 0.1, 10.0).unwrap();
        let below = analysis::phi_max_simulated(alpha, 0.1, 10.0, solved.omega_c - 0.05).unwrap();
        let above = analysis::phi_max_simulated(alpha, 0.1, 10.0, solved.omega_c + 0.05).unwrap();
        assert!(
            below < 2.0 / 3.0 && above > 2.0 / 3.0,
            "{alpha:?}: phi({}) = {below}, phi({}) = {above}",
            solved.omega_c - 0.05,
            solved.omega_c + 0.05
        );
    }
}

#[test]
fn dephased_channel_negativity_has_no_sudden_death() {
    let f = |t: f64| {
        let spec = ChannelSpec::new(ChannelKind::Dephasing, 0.1, t).unwrap();
        let state = telesim::channels::channel_state(&spec).unwrap();
        analysis::negativity(&state, 0).unwrap()
    };
    let result = analysis::esd_time(f, 30.0, &SEARCH).unwrap();
    assert!(
        result.death_time.is_none(),
        "smooth exponential decay must not report death"
    );
}

#[test]
fn table_one_spot_value_and_internal_orderings() {
    let rows = analysis::table1().unwrap();
    // The all-x-axis class is the anchor value reproduced to print precision.
    assert!((rows[0].tau_prime - 4.41327).abs() < 5e-3);
    // The one-idle-qubit class doubles it exactly.
    assert!((rows[5].tau_prime - 2.0 * rows[0].tau_prime).abs() < 1e-4);
    // Noisy channels always die sooner.
    for row in &rows {
        assert!(
            row.tau_double_prime < row.tau_prime,
            "class {:?}: tau'' {} must be below tau' {}",
            row.outcomes,
            row.tau_double_prime,
            row.tau_prime
        );
    }
}

#[test]
fn breaking_the_idle_rule_breaks_the_doubling() {
    // Mutation check: with idle branches exposed to noise, the doubling
    // identity and the idle-class value collapse.
    let result = acceptance::criterion_7_with(IdleRule::Exposed);
    assert!(!result.passed);
    assert!(
        result.failures.iter().any(|f| f.contains("doubling")),
        "expected the doubling check among the failures: {:?}",
        result.failures
    );
}

#[test]
fn bitflip_channel_behaves_like_dephased_for_perfect_recovery() {
    // Same negativity decay and fidelity: the two one-generator noises are
    // interchangeable at the averaged level.
    for &t0 in &[1.0, 5.0] {
        let zeta = ChannelSpec::new(ChannelKind::Dephasing, 0.1, t0).unwrap();
        let xi = ChannelSpec::new(ChannelKind::BitFlip, 0.1, t0).unwrap();
        let nz =
            analysis::negativity(&telesim::channels::channel_state(&zeta).unwrap(), 0).unwrap();
        let nx = analysis::negativity(&telesim::channels::channel_state(&xi).unwrap(), 0).unwrap();
        assert!((nz - nx).abs() < 1e-10);
        let fz = average_fidelity(&zeta, &RecoverySpec::perfect()).unwrap();
        let fx = average_fidelity(&xi, &RecoverySpec::perfect()).unwrap();
        assert!((fz - fx).abs() < 1e-10);
    }
}

#[test]
fn combined_channel_negativity_sits_below_dephased() {
    for &t0 in &[0.5, 1.0, 2.0, 4.0] {
        let mu = ChannelSpec::new(ChannelKind::Combined, 0.1, t0).unwrap();
        let zeta = ChannelSpec::new(ChannelKind::Dephasing, 0.1, t0).unwrap();
        let nm = analysis::negativity(&telesim::channels::channel_state(&mu).unwrap(), 0).unwrap();
        let nz =
            analysis::negativity(&telesim::channels::channel_state(&zeta).unwrap(), 0).unwrap();
        assert!(
            nm < nz,
            "combined noise must hurt more: {nm} vs {nz} at t0 = {t0}"
        );
    }
}

#[test]
fn stiff_rate_fails_loudly_instead_of_hanging() {
    let model = LindbladModel::new(telesim::linalg::ComplexMatrix::zeros(2))
        .unwrap()
        .with_term(pauli(3), 1e15)
        .unwrap();
    let rho = PureQubit::new(1.0, 0.0).unwrap().density();
    match lindblad::evolve(&rho, &model, 1.0, TOL.integrator) {
        Err(Error::StepSizeUnderflow { .. }) => {}
        other => panic!("expected a step-size underflow, got {other:?}"),
    }
}

#[test]
fn fidelity_curve_agrees_with_pointwise_average_fidelity() {
    let channel = ChannelSpec::new(ChannelKind::Dephasing, 0.1, 10.0).unwrap();
    let ts = [0.0, 1.0, 2.5, 6.0];
    for alpha in [RecoveryKind::Intrinsic, RecoveryKind::BitPhaseFlip] {
        let rec = RecoverySpec::noisy(alpha, 1.0, 0.1, 0.0).unwrap();
        let curve = fidelity_curve(&channel, &rec, &ts).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let rec_t = RecoverySpec::noisy(alpha, 1.0, 0.1, t).unwrap();
            let point = average_fidelity(&channel, &rec_t).unwrap();
            assert!((curve[k] - point).abs() < 1e-9);
        }
    }
}

#[test]
fn all_branches_carry_states_for_the_channel_family() {
    // The zero-probability flag never fires for these channels.
    let psi = PureQubit::new(2.8, 1.1).unwrap();
    for kind in [
        ChannelKind::Ideal,
        ChannelKind::Dephasing,
        ChannelKind::BitFlip,
        ChannelKind::Combined,
    ] {
        let spec = ChannelSpec::new(kind, 0.1, 7.0).unwrap();
        let branches = teleport_single(&psi, &spec, &RecoverySpec::perfect()).unwrap();
        assert!(branches
            .iter()
            .all(|b| b.state.is_some() && b.probability > 0.2));
    }
}
