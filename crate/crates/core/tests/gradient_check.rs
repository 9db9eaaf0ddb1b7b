//! Analytic gradients against central finite differences, one head at a time.

mod support;

use advgo::nnet::LossWeights;
use support::gradients::{check, only};

const TOLERANCE: f64 = 1e-4;

#[test]
fn policy_head_gradient_matches_finite_differences() {
    let (err, live) = check(only("policy"));
    assert!(err < TOLERANCE && live > 100, "max relative error {err}, live {live}");
}

#[test]
fn value_head_gradient_matches_finite_differences() {
    let (err, live) = check(only("value"));
    assert!(err < TOLERANCE && live > 100, "max relative error {err}, live {live}");
}

#[test]
fn ownership_head_gradient_matches_finite_differences() {
    let (err, live) = check(only("ownership"));
    assert!(err < TOLERANCE && live > 100, "max relative error {err}, live {live}");
}

#[test]
fn opponent_head_gradient_matches_finite_differences() {
    let (err, live) = check(only("opponent"));
    assert!(err < TOLERANCE && live > 100, "max relative error {err}, live {live}");
}

#[test]
fn combined_loss_gradient_matches_finite_differences() {
    let (err, _) = check(LossWeights::default());
    assert!(err < TOLERANCE, "max relative error {err}");
}
