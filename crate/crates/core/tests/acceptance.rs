//! Acceptance battery: nine numbered criteria, one test each.
//!
//! Every test prints a single `criterion N (name): PASS|FAIL` line (visible
//! with `cargo test --test acceptance -- --nocapture`) and then asserts the
//! criterion passed, so a red criterion fails the build while its first
//! failing instance stays visible in the captured output.

use riskdual::suite::{
    criterion_1_envelopes, criterion_2_duality, criterion_3_penalty_duality,
    criterion_4_conjugates, criterion_5_axioms, criterion_6_fatou, criterion_7_stationary,
    criterion_8_localization, criterion_9_determinism, CriterionResult, DEFAULT_SEED,
};

fn report(result: CriterionResult) {
    let status = if result.passed { "PASS" } else { "FAIL" };
    println!(
        "criterion {} ({}): {} — {}",
        result.index, result.name, status, result.detail
    );
    assert!(
        result.passed,
        "criterion {} ({}) failed: {}",
        result.index, result.name, result.detail
    );
}

#[test]
fn criterion_1_lipschitz_envelopes() {
    report(criterion_1_envelopes(DEFAULT_SEED).expect("criterion 1 infrastructure"));
}

#[test]
fn criterion_2_bipolar_duality() {
    report(criterion_2_duality(DEFAULT_SEED).expect("criterion 2 infrastructure"));
}

#[test]
fn criterion_3_entropic_penalty_duality() {
    report(criterion_3_penalty_duality(DEFAULT_SEED).expect("criterion 3 infrastructure"));
}

#[test]
fn criterion_4_penalty_conjugates() {
    report(criterion_4_conjugates(DEFAULT_SEED).expect("criterion 4 infrastructure"));
}

#[test]
fn criterion_5_utility_axioms() {
    report(criterion_5_axioms(DEFAULT_SEED).expect("criterion 5 infrastructure"));
}

#[test]
fn criterion_6_monotone_continuity() {
    report(criterion_6_fatou(DEFAULT_SEED).expect("criterion 6 infrastructure"));
}

#[test]
fn criterion_7_stationary_sequences() {
    report(criterion_7_stationary(DEFAULT_SEED).expect("criterion 7 infrastructure"));
}

#[test]
fn criterion_8_support_localization() {
    report(criterion_8_localization(DEFAULT_SEED).expect("criterion 8 infrastructure"));
}

#[test]
fn criterion_9_determinism_of_reruns() {
    report(criterion_9_determinism(DEFAULT_SEED).expect("criterion 9 infrastructure"));
}
