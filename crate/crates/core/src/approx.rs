//! First- and second-order approximations of the predictive weights.
//!
//! With `β_n = φ_h(n k^{-1/α})`, the new-type weight `V_{n+1,k+1}/V_{n,k}` and
//! the existing-type factor `V_{n+1,k}/V_{n,k}` are approximated by
//!
//! | form       | new-type weight        | existing-type factor |
//! |------------|------------------------|----------------------|
//! | first      | `kα/n`                 | `1/n`                |
//! | rational   | `(β + kα)/(β + n)`     | `1/(β + n)`          |
//! | expanded   | `kα/n + β/n`           | `1/n - β/n²`         |
//!
//! The rational form is always normalized and reproduces the
//! Poisson–Dirichlet weights exactly. The expanded form leaves a
//! normalization defect of `kαβ/n²`.

use std::fmt;

use crate::error::{domain, Result};
use crate::model::{check_counts, GibbsModel};

/// How a set of predictive weights was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightForm {
    Exact,
    FirstOrder,
    SecondOrderRational,
    SecondOrderExpanded,
    MonteCarlo,
}

impl fmt::Display for WeightForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightForm::Exact => "exact",
            WeightForm::FirstOrder => "first",
            WeightForm::SecondOrderRational => "second_rational",
            WeightForm::SecondOrderExpanded => "second_expanded",
            WeightForm::MonteCarlo => "mc",
        })
    }
}

/// Which second-order approximation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SecondOrderForm {
    #[default]
    Rational,
    Expanded,
}

/// The pair defining the predictive rule: a new type has probability
/// `new_mass`, and existing type `i` with frequency `n_i` has probability
/// `existing_factor · (n_i - α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveWeights {
    pub new_mass: f64,
    pub existing_factor: f64,
    pub form: WeightForm,
    /// Standard error of `new_mass` for Monte Carlo estimates.
    pub std_error: Option<f64>,
    /// Set when the expanded form's existing factor was clamped at zero.
    pub clamped: bool,
    /// Set when a Monte Carlo estimate fell outside `[0, 1]`.
    pub out_of_range: bool,
}

impl PredictiveWeights {
    pub fn new(new_mass: f64, existing_factor: f64, form: WeightForm) -> Self {
        Self { new_mass, existing_factor, form, std_error: None, clamped: false, out_of_range: false }
    }

    /// `new_mass + (n - kα) existing_factor - 1`.
    pub fn normalization_defect(&self, n: u64, k: u64, alpha: f64) -> f64 {
        self.new_mass + (n as f64 - k as f64 * alpha) * self.existing_factor - 1.0
    }
}

/// `β_n = φ_h(n k^{-1/α})`.
pub fn beta_n(model: &GibbsModel, n: u64, k: u64) -> Result<f64> {
    check_counts(n, k)?;
    let t = n as f64 * (k as f64).powf(-1.0 / model.alpha());
    model.phi_h(t)
}

/// First-order weights `(kα/n, 1/n)`; the tilt does not enter.
pub fn first_order_weights(model: &GibbsModel, n: u64, k: u64) -> Result<PredictiveWeights> {
    check_counts(n, k)?;
    let (n, k) = (n as f64, k as f64);
    Ok(PredictiveWeights::new(k * model.alpha() / n, 1.0 / n, WeightForm::FirstOrder))
}

pub fn second_order_weights(model: &GibbsModel, n: u64, k: u64, form: SecondOrderForm) -> Result<PredictiveWeights> {
    let beta = beta_n(model, n, k)?;
    let ka = k as f64 * model.alpha();
    let n = n as f64;
    match form {
        SecondOrderForm::Rational => {
            let denom = beta + n;
            if !(denom > 0.0) {
                return Err(domain(format!("rational form needs β_n + n > 0, got β_n = {beta}")));
            }
            Ok(PredictiveWeights::new((beta + ka) / denom, 1.0 / denom, WeightForm::SecondOrderRational))
        }
        SecondOrderForm::Expanded => {
            let factor = 1.0 / n - beta / (n * n);
            let mut w = PredictiveWeights::new(ka / n + beta / n, factor.max(0.0), WeightForm::SecondOrderExpanded);
            w.clamped = factor < 0.0;
            Ok(w)
        }
    }
}
