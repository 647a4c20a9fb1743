//! One test per acceptance criterion, so the runner prints one pass/fail
//! line each. The suite is computed once and shared.

use std::sync::OnceLock;

use dirac_quant::suites::{determinism, run_suite, CriterionOutcome, SuiteReport, DEFAULT_SEED};

fn suite() -> &'static SuiteReport {
    static RUN: OnceLock<SuiteReport> = OnceLock::new();
    RUN.get_or_init(|| run_suite(DEFAULT_SEED))
}

fn verdict(c: &CriterionOutcome) {
    let tag = if c.passed { "PASS" } else { "FAIL" };
    println!("criterion {} [{tag}] {}: {} cases, {} failures", c.id, c.title, c.cases, c.failures.len());
    assert!(c.passed, "criterion {} failed:\n{}", c.id, c.failures.join("\n"));
}

fn criterion(id: u8) {
    verdict(&suite().criteria[id as usize - 1]);
}

#[test]
fn criterion_1_bracket_identities() {
    criterion(1);
}

#[test]
fn criterion_2_lemma1_equivalence() {
    criterion(2);
}

#[test]
fn criterion_3_star_products() {
    criterion(3);
}

#[test]
fn criterion_4_tight_family_equations() {
    criterion(4);
}

#[test]
fn criterion_5_transport() {
    criterion(5);
}

#[test]
fn criterion_6_holonomy_relations() {
    criterion(6);
}

#[test]
fn criterion_7_algebroid_coherence() {
    criterion(7);
}

#[test]
fn criterion_8_determinism() {
    verdict(&determinism(suite(), &run_suite(DEFAULT_SEED)));
}
