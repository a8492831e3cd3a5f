//! The catalog verification run, one test per criterion. The report is computed once
//! and shared; each test prints a single pass/fail line for its criterion.

use std::sync::OnceLock;

use xihom::verify::{verify_catalog, CriterionResult, VerifyOptions, VerifyReport};

fn report() -> &'static VerifyReport {
    static REPORT: OnceLock<VerifyReport> = OnceLock::new();
    REPORT.get_or_init(|| verify_catalog(&VerifyOptions::default()))
}

fn criterion(id: u8) {
    let c: &CriterionResult = report().criterion(id).expect("criterion is reported");
    let verdict = if c.passed { "PASS" } else { "FAIL" };
    eprintln!("criterion {id} {verdict}: {} ({} checks, {} failed)", c.name, c.checks, c.failed);
    for f in &c.failures {
        eprintln!("    {f}");
    }
    assert!(c.checks > 0, "criterion {id} ran no checks");
    assert!(c.passed, "criterion {id} failed: {:#?}", c.failures);
}

#[test]
fn criterion_1_proper_class_axioms() {
    criterion(1);
}

#[test]
fn criterion_2_ext_via_two_resolutions() {
    criterion(2);
}

#[test]
fn criterion_3_projective_and_injective_routes() {
    criterion(3);
}

#[test]
fn criterion_4_vanishing_detects_dimensions() {
    criterion(4);
}

#[test]
fn criterion_5_complete_resolutions_validate() {
    criterion(5);
}

#[test]
fn criterion_6_complete_ext_oracles() {
    criterion(6);
}

#[test]
fn criterion_7_vanishing_matrices() {
    criterion(7);
}

#[test]
fn criterion_8_homotopy_uniqueness() {
    criterion(8);
}
