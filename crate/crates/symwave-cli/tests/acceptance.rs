//! The validation suite as one test per criterion. Each prints its
//! measured/target/tolerance row so the run log documents the numbers
//! even when everything passes.

use symwave_cli::run_criterion;

fn check(index: usize) {
    let out = run_criterion(index).expect("criterion execution failed");
    println!(
        "criterion {:02} {}: measured {:.6e}, target {:.6e}, tolerance {:.6e}, {:.2}s [{}] {}",
        out.index,
        out.name,
        out.measured,
        out.target,
        out.tolerance,
        out.seconds,
        if out.pass { "pass" } else { "FAIL" },
        out.detail
    );
    assert!(
        out.pass,
        "criterion {:02} {}: measured {:.6e} (target {:.6e}, tolerance {:.6e}): {}",
        out.index, out.name, out.measured, out.target, out.tolerance, out.detail
    );
}

#[test]
fn criterion_01_deep_ratio_constant() {
    check(1);
}

#[test]
fn criterion_02_moment_normalization() {
    check(2);
}

#[test]
fn criterion_03_deep_asymptote_agreement() {
    check(3);
}

#[test]
fn criterion_04_monte_carlo_series_agreement() {
    check(4);
}

#[test]
fn criterion_05_symmetric_dominates_independent() {
    check(5);
}

#[test]
fn criterion_06_medium_only_upper_bound() {
    check(6);
}

#[test]
fn criterion_07_strong_barrier_growth_law() {
    check(7);
}

#[test]
fn criterion_08_weak_barrier_slope_signs() {
    check(8);
}

#[test]
fn criterion_09_closed_form_error_scaling() {
    check(9);
}

#[test]
fn criterion_10_ensemble_mean_first_order() {
    check(10);
}

#[test]
fn criterion_11_single_mode_consistency() {
    check(11);
}
