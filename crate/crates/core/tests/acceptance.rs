//! The acceptance gate: one test per numbered criterion. Each prints its
//! PASS/FAIL summary line (visible with --nocapture) and asserts the
//! criterion passed, listing every failing check otherwise.

use telesim::acceptance;

fn run(result: acceptance::CriterionResult) {
    println!("{}", result.summary_line());
    for f in &result.failures {
        println!("    {f}");
    }
    if let Some(note) = &result.note {
        println!("    note: {note}");
    }
    assert!(
        result.passed,
        "{}\n{}\n{}",
        result.summary_line(),
        result.failures.join("\n"),
        result.note.as_deref().unwrap_or("")
    );
}

#[test]
fn criterion_1_channel_reconstruction() {
    run(acceptance::criterion_1());
}

#[test]
fn criterion_2_negativity_oracles() {
    run(acceptance::criterion_2());
}

#[test]
fn criterion_3_fidelity_oracle_equivalence() {
    run(acceptance::criterion_3());
}

#[test]
fn criterion_4_critical_frequencies() {
    run(acceptance::criterion_4());
}

#[test]
fn criterion_5_threshold_coincidence() {
    run(acceptance::criterion_5());
}

#[test]
fn criterion_6_two_qubit_closed_forms() {
    run(acceptance::criterion_6());
}

#[test]
fn criterion_7_table_one() {
    run(acceptance::criterion_7());
}

#[test]
fn criterion_8_table_two() {
    run(acceptance::criterion_8());
}

#[test]
fn criterion_9_property_suite() {
    run(acceptance::criterion_9());
}
