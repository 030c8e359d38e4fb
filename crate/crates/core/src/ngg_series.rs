//! Extended-precision evaluation of the normalized generalized Gamma weights.
//!
//! With `h(t) = exp(τ^α - τt)` and the stable law normalized by
//! `E[e^{-sT}] = e^{-s^α}`, expanding `(u+τ)^{n-1}` binomially in the
//! one-dimensional form of `V_{n,k}` gives
//!
//! ```text
//! V_{n,k} = α^{k-1} e^{τ^α} / Γ(n) · Σ_{i=0}^{n-1} C(n-1, i) (-τ)^i Γ(k - i/α, τ^α).
//! ```
//!
//! At `τ = 0` only `i = 0` survives and `V_{n,k} = α^{k-1} Γ(k) / Γ(n)`. The
//! alternating sum cancels catastrophically as `n` and `τ` grow, so it is
//! evaluated with MPFR at a caller-chosen number of decimal digits, and a
//! result that lost more than half of those digits is reported as an error
//! rather than returned.

use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Error, Result};
use crate::model::{check_counts, stable_log_v, LogValue};
use crate::special::ln_gamma;
use crate::stable::StableIndex;

pub const DEFAULT_PRECISION_DIGITS: u32 = 50;

fn bits_for(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32
}

/// `Γ(a, b)` at the working precision of `b`, for any real `a` and `b > 0`.
/// Nonpositive `a` go through the downward recurrence from `a - ⌊a⌋`.
fn upper_gamma(a: &Float, b: &Float) -> Float {
    let prec = b.prec();
    if *a > 0 {
        return Float::with_val(prec, a.gamma_inc_ref(b));
    }
    let floor = Float::with_val(prec, a.floor_ref());
    let base = Float::with_val(prec, a - &floor);
    let steps = (-floor.to_f64()).round() as u64;
    let mut value = Float::with_val(prec, base.gamma_inc_ref(b));
    // tail = b^s e^{-b}, starting from s = base - 1
    let ln_b = Float::with_val(prec, b.ln_ref());
    let mut s = Float::with_val(prec, &base - 1u32);
    let mut tail = Float::with_val(prec, &s * &ln_b);
    tail -= b;
    tail.exp_mut();
    for _ in 0..steps {
        value -= &tail;
        value /= &s;
        tail /= b;
        s -= 1u32;
    }
    value
}

/// The alternating sum `S_{n,k} = Σ C(n-1,i) (-τ)^i Γ(k - i/α, τ^α)` and the
/// magnitude of its largest term.
fn series_sum(n: u64, k: u64, alpha: f64, tau: f64, prec: u32) -> (Float, Float) {
    let a = Float::with_val(prec, alpha);
    let b = Float::with_val(prec, Float::with_val(prec, tau).pow(&a));
    let neg_tau = Float::with_val(prec, -tau);
    let mut coeff = Float::with_val(prec, 1u32); // C(n-1, i) (-τ)^i
    let mut sum = Float::with_val(prec, 0u32);
    let mut largest = Float::with_val(prec, 0u32);
    for i in 0..n {
        let shape = Float::with_val(prec, Float::with_val(prec, k) - Float::with_val(prec, i) / &a);
        let term = Float::with_val(prec, &coeff * &upper_gamma(&shape, &b));
        let mag = Float::with_val(prec, term.abs_ref());
        if mag > largest {
            largest = mag;
        }
        sum += &term;
        coeff *= &neg_tau;
        coeff *= n - 1 - i;
        coeff /= i + 1;
    }
    (sum, largest)
}

fn checked_sum(n: u64, k: u64, alpha: f64, tau: f64, digits: u32) -> Result<Float> {
    let (sum, largest) = series_sum(n, k, alpha, tau, bits_for(digits));
    let lost = if sum.is_zero() || !sum.is_finite() {
        f64::INFINITY
    } else {
        largest.log10().to_f64() - sum.clone().abs().log10().to_f64()
    };
    if lost > f64::from(digits) / 2.0 || sum <= 0 {
        return Err(Error::PrecisionInsufficient { digits, cancellation: 10f64.powf(lost) });
    }
    Ok(sum)
}

fn validate(n: u64, k: u64, alpha: f64, tau: f64, digits: u32) -> Result<()> {
    check_counts(n, k)?;
    StableIndex::new(alpha)?;
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(domain(format!("generalized Gamma needs τ ≥ 0, got {tau}")));
    }
    if digits == 0 {
        return Err(domain("precision must be at least one digit"));
    }
    Ok(())
}

/// `ln V_{n,k}` of the normalized generalized Gamma prior from the alternating
/// incomplete-gamma series, evaluated with `digits` decimal digits.
pub fn ngg_log_v_series(n: u64, k: u64, alpha: f64, tau: f64, digits: u32) -> Result<LogValue> {
    validate(n, k, alpha, tau, digits)?;
    if tau == 0.0 {
        return stable_log_v(n, k, alpha);
    }
    let sum = checked_sum(n, k, alpha, tau, digits)?;
    let ln_sum = sum.ln().to_f64();
    let ln_v = (k - 1) as f64 * alpha.ln() + tau.powf(alpha) + ln_sum - ln_gamma(n as f64);
    Ok(LogValue::positive(ln_v))
}

/// New-type weight and existing-type factor `(1 - (n - αk) r, r)` with
/// `r = V_{n+1,k} / V_{n,k}` formed in extended precision.
///
/// Returns [`Error::OutOfRange`] if the new-type weight is not in `(0, 1)`.
pub fn ngg_exact_weights(n: u64, k: u64, alpha: f64, tau: f64, digits: u32) -> Result<(f64, f64)> {
    validate(n, k, alpha, tau, digits)?;
    if tau == 0.0 {
        return Ok((k as f64 * alpha / n as f64, 1.0 / n as f64));
    }
    let here = checked_sum(n, k, alpha, tau, digits)?;
    let next = checked_sum(n + 1, k, alpha, tau, digits)?;
    let prec = here.prec();
    // V_{n+1,k} / V_{n,k} = S_{n+1,k} / (n S_{n,k})
    let mut ratio = Float::with_val(prec, &next / &here);
    ratio /= n;
    let mass = Float::with_val(prec, Float::with_val(prec, n) - Float::with_val(prec, alpha) * k);
    let weight = Float::with_val(prec, 1u32 - Float::with_val(prec, &mass * &ratio));
    let w = weight.to_f64();
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::OutOfRange { value: w });
    }
    Ok((w, ratio.to_f64()))
}

/// New-type predictive weight `1 - (n - αk) V_{n+1,k} / V_{n,k}` of the
/// normalized generalized Gamma prior. See [`ngg_exact_weights`].
pub fn ngg_predictive_weight_exact(n: u64, k: u64, alpha: f64, tau: f64, digits: u32) -> Result<f64> {
    ngg_exact_weights(n, k, alpha, tau, digits).map(|(w, _)| w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_zero_is_stable() {
        let v = ngg_log_v_series(5, 2, 0.5, 0.0, 50).unwrap();
        assert!((v.ln_abs - (1.0f64 / 48.0).ln()).abs() < 1e-14);
        let w = ngg_predictive_weight_exact(10, 4, 0.5, 0.0, 50).unwrap();
        assert_eq!(w, 0.2);
    }

    #[test]
    fn upper_gamma_matches_f64_path() {
        let prec = bits_for(40);
        let b = Float::with_val(prec, 1.7);
        for a in [-6.0, -3.25, -1.0, -0.5, 0.0, 0.3, 2.5] {
            let hp = upper_gamma(&Float::with_val(prec, a), &b).to_f64();
            let lp = crate::special::incomplete_gamma(a, 1.7).unwrap();
            assert!(((hp - lp) / lp).abs() < 1e-12, "a={a}: {hp} vs {lp}");
        }
    }

    #[test]
    fn frozen_small_values() {
        // 80-digit reference evaluations of the one-dimensional integral form.
        let cases = [
            (5, 2, 0.5, 1.0, 0.016_193_997_772_304_4),
            (20, 6, 0.5, 1.0, 4.261_550_389_313_11e-17),
            (10, 4, 0.25, 3.0, 6.713_662_587_940_8e-7),
            (30, 9, 0.75, 3.0, 7.505_869_686_415_07e-29),
        ];
        for (n, k, a, tau, want) in cases {
            let got = ngg_log_v_series(n, k, a, tau, 50).unwrap().value();
            assert!(((got - want) / want).abs() < 1e-13, "({n},{k},{a},{tau}): {got} vs {want}");
        }
    }

    #[test]
    fn cancellation_is_detected() {
        assert!(ngg_log_v_series(100, 20, 0.5, 10.0, 50).unwrap().ln_abs.is_finite());
        let err = ngg_log_v_series(100, 20, 0.5, 10.0, 15).unwrap_err();
        assert!(matches!(err, Error::PrecisionInsufficient { digits: 15, .. }), "{err}");
        let err = ngg_predictive_weight_exact(100, 30, 0.5, 10.0, 15).unwrap_err();
        assert!(matches!(err, Error::PrecisionInsufficient { .. } | Error::OutOfRange { .. }), "{err}");
    }

    #[test]
    fn argument_errors() {
        assert!(ngg_log_v_series(3, 4, 0.5, 1.0, 50).is_err());
        assert!(ngg_log_v_series(3, 2, 0.5, -1.0, 50).is_err());
        assert!(ngg_log_v_series(3, 2, 1.5, 1.0, 50).is_err());
        assert!(ngg_log_v_series(3, 2, 0.5, 1.0, 0).is_err());
    }
}
