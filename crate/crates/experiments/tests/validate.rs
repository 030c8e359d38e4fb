use gibbs_experiments::validate::{run_validation, ValidateOptions};
use gibbs_predictive::{stable_pdf, StableIndex};

#[test]
fn quick_suite_passes() {
    let checks = run_validation(ValidateOptions { quick: true, ..Default::default() }, &stable_pdf);
    for c in &checks {
        assert!(c.passed, "{c}");
    }
}

#[test]
fn corrupted_density_is_caught() {
    let corrupted = |x: f64, a: StableIndex| stable_pdf(x, a).map(|f| f * 1.0001);
    let checks = run_validation(ValidateOptions { quick: true, ..Default::default() }, &corrupted);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failed.len(), 2, "{failed:?}");
}
