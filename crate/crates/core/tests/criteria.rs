mod common;

use approx::assert_abs_diff_eq;
use inflation_spectra::cocycle::table1_row;

use common::{fibonacci_chi_b, Outcome, TABLE1_REFERENCE};

fn assert_outcome(o: Outcome) {
    assert!(o.pass, "{}", o.detail);
}

#[test]
fn table1_rows_at_each_change_of_n() {
    for m in [1u64, 2, 4, 7, 17, 18, 20] {
        let row = table1_row(m, 2048).unwrap();
        let (log_lambda, n, mean) = TABLE1_REFERENCE[m as usize - 1];
        assert_abs_diff_eq!(row.log_lambda, log_lambda, epsilon = 1e-3);
        assert_eq!(row.n, n, "m = {m}");
        assert_abs_diff_eq!(row.mean, mean, epsilon = 2e-3);
    }
}

#[test]
fn mahler_measure_crosses_log_lambda_between_17_and_18() {
    assert_outcome(common::figure1_crossing());
}

#[test]
fn mahler_closed_forms_bounds_and_limits() {
    assert_outcome(common::mahler_closed_forms());
}

#[test]
fn determinant_average_vanishes() {
    assert_outcome(common::determinant_average());
}

#[test]
fn sum_rule_and_positive_minimal_exponent() {
    assert_outcome(common::sum_rule_and_positivity());
}

#[test]
fn fibonacci_exponents_coincide() {
    let (coarse, _, _) = fibonacci_chi_b(10_000);
    let (mean, _, hi) = fibonacci_chi_b(100_000);
    assert!(hi < 1e-3, "χ^B up to {hi}");
    assert!(mean < coarse, "χ^B did not decrease: {coarse} → {mean}");
}

#[test]
fn constant_length_exponents_coincide() {
    assert_outcome(common::constant_length_exponents_vanish());
}

#[test]
fn positivity_iteration_converges() {
    assert_outcome(common::positivity_iteration_check());
}

#[test]
fn pair_correlations_renormalise() {
    assert_outcome(common::renormalization_relations());
}

#[test]
fn intensities_and_peak_exponents() {
    assert_outcome(common::intensities());
}

#[test]
fn recoded_tilde_fixed_point_matches() {
    assert_outcome(common::mld_recode());
}
