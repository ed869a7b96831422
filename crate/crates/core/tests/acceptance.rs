//! Acceptance gate: one pass/fail line per reference criterion, with the
//! tolerances pinned below.

use diskdyn::cli::{suite_output, EXIT_NUMERICAL};
use diskdyn::suite::{run_criterion, Tolerances, CRITERIA};

fn pinned() -> Tolerances {
    Tolerances {
        dw_location: 1e-6,
        angular_derivative: 1e-6,
        step_closed_form: 1e-12,
        zero_step_level: 1e-3,
        constant_step: 1e-12,
        zeta_zero: 1e-9,
        zeta_closed_form: 1e-10,
        tau_distance: 0.1,
        real_axis: 1e-10,
        square_factor: 2.0,
        u_theta_residual: 1e-10,
        abel_residual: 1e-2,
        anchor: 1e-14,
        merging_level: 1e-3,
        monotone_slack: 1e-12,
        schwarz_pick: 1e-12,
        back_evaluation: 1e-10,
        boundary_modulus: 1e-10,
        mobius_invariance: 1e-12,
        julia_ratio: 1e-9,
        counting_example: 1e-9,
        counting_closed_form: 1e-12,
        comparability_band: (0.8335, 0.8624),
    }
}

#[test]
fn pinned_tolerances_match_defaults() {
    assert_eq!(pinned(), Tolerances::default());
}

#[test]
fn acceptance_criteria() {
    let tol = pinned();
    let mut failed = Vec::new();
    println!();
    for (id, name) in CRITERIA {
        let r = run_criterion(id, &tol);
        assert_eq!(r.name, name);
        println!("{r}");
        if !r.passed {
            failed.push(format!("{id} {name}"));
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

#[test]
fn tampered_tolerance_names_the_failing_criterion() {
    let tol = Tolerances {
        tau_distance: 1e-6,
        ..pinned()
    };
    let results: Vec<_> = CRITERIA.iter().filter(|(id, _)| *id == 6).map(|(id, _)| run_criterion(*id, &tol)).collect();
    let (code, summary, _) = suite_output(&results);
    assert_eq!(code, EXIT_NUMERICAL);
    let failed = summary["failed"].as_array().unwrap();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0], CRITERIA[5].1);
}
