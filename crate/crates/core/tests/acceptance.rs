//! One test per acceptance criterion. Each prints a PASS/FAIL line; run with
//! `--nocapture` to see them. The criteria carry runtime limits, so they are
//! serialized rather than left to compete for cores.

use std::sync::Mutex;

use locinfo::acceptance;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u8) {
    let _guard = SERIAL.lock().unwrap_or_else(|p| p.into_inner());
    let report = acceptance::run(id);
    println!("{report}");
    assert!(report.passed, "{report}");
}

#[test]
fn criterion_1_bell_lower_bound() {
    criterion(1);
}

#[test]
fn criterion_2_oracle_vs_formula() {
    criterion(2);
}

#[test]
fn criterion_3_two_step_achievability() {
    criterion(3);
}

#[test]
fn criterion_4_subentropy_values() {
    criterion(4);
}

#[test]
fn criterion_5_sandwich_invariants() {
    criterion(5);
}

#[test]
fn criterion_6_scrooge_saturation() {
    criterion(6);
}

#[test]
fn criterion_7_distillation_bound() {
    criterion(7);
}

#[test]
fn criterion_8_e1_sweep() {
    criterion(8);
}

#[test]
fn criterion_9_cross_method_consistency() {
    criterion(9);
}
