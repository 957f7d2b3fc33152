//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line. `cargo test --test acceptance -- --nocapture` shows the full table.

use fbs_cli::suite::{self, CriterionResult};

fn check(result: CriterionResult) {
    println!("{}", result.pass_line());
    assert!(
        result.pass,
        "criterion {} failed: measured {} | expected {}",
        result.id, result.measured, result.expected
    );
    assert!(
        result.runtime <= result.runtime_limit,
        "criterion {} overran its runtime budget: {:.2?} > {:.2?}",
        result.id,
        result.runtime,
        result.runtime_limit
    );
}

#[test]
fn criterion_01_g2_closed_point() {
    check(suite::c01_g2_closed_point());
}

#[test]
fn criterion_02_fidelity_identity() {
    check(suite::c02_fidelity_identity());
}

#[test]
fn criterion_03_cos_phi_inversion() {
    check(suite::c03_cos_phi_inversion());
}

#[test]
fn criterion_04_dip_width() {
    check(suite::c04_dip_width());
}

#[test]
fn criterion_05_ideal_anchors() {
    check(suite::c05_ideal_anchors());
}

#[test]
fn criterion_06_tuning_scan_structure() {
    check(suite::c06_tuning_scan_structure());
}

#[test]
fn criterion_07_conversion_pulse() {
    check(suite::c07_conversion_pulse());
}

#[test]
fn criterion_08_oracle_equivalences() {
    check(suite::c08_oracle_equivalences());
}

#[test]
fn criterion_09_monte_carlo_agreement() {
    check(suite::c09_monte_carlo_agreement());
}

#[test]
fn criterion_10_counting_estimator() {
    check(suite::c10_counting_estimator());
}
