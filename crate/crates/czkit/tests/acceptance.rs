//! Acceptance suite: one test per criterion, each printing a single
//! `[acceptance] <name>: PASS/FAIL (<detail>)` line (visible with
//! `cargo test -- --nocapture`, and in the failure report otherwise).

use czkit::endpoint::acceptance::{self, CriterionResult};

fn assert_criterion(result: czkit::Result<CriterionResult>) {
    let result = result.expect("criterion must evaluate");
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn orlicz_indicator_identity() {
    assert_criterion(acceptance::criterion_indicator_identity());
}

#[test]
fn orlicz_dichotomy_and_equivalence() {
    assert_criterion(acceptance::criterion_dichotomy_equivalence());
}

#[test]
fn orlicz_maximal_matches_iterated() {
    assert_criterion(acceptance::criterion_orlicz_maximal_equivalence());
}

#[test]
fn commutator_routes_agree() {
    assert_criterion(acceptance::criterion_commutator_routes());
}

#[test]
fn commutator_pointwise_domination() {
    assert_criterion(acceptance::criterion_pointwise_domination());
}

#[test]
fn maximal_endpoint_bounded_and_sharp() {
    assert_criterion(acceptance::criterion_maximal_endpoint());
}

#[test]
fn commutator_endpoint_bounded_and_sharp() {
    assert_criterion(acceptance::criterion_commutator_endpoint());
}

#[test]
fn commutator_strong_bound() {
    assert_criterion(acceptance::criterion_strong_bound());
}

#[test]
fn weight_class_characterization() {
    assert_criterion(acceptance::criterion_weight_characterization());
}

#[test]
fn maximal_closed_form() {
    assert_criterion(acceptance::criterion_maximal_closed_form());
}

#[test]
fn weak_norm_interpolation() {
    assert_criterion(acceptance::criterion_kolmogorov());
}

#[test]
fn sharp_function_controls_maximal() {
    assert_criterion(acceptance::criterion_sharp_function_control());
}
