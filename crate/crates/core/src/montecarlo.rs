//! Monte Carlo and quadrature evaluation of `V_{n,k}` for any tilt.
//!
//! Writing `T = X / Y` with `Y ~ Beta(kα, n - kα)` independent of a
//! polynomially tilted stable `X` of order `k`,
//!
//! ```text
//! V_{n,k} = α^{k-1} Γ(k) / Γ(n) · E[h(X / Y)],
//! ```
//!
//! which for the generalized Gamma tilt `h(t) = exp(τ^α - τt)` is the
//! expectation estimated here. Replicates are generated in fixed-size chunks,
//! each on its own sub-stream, and reduced in chunk order, so estimates do not
//! depend on the number of worker threads.
//!
//! [`quadrature_v`] evaluates the defining double integral directly and
//! serves as a deterministic reference at small `n`.

use rand_distr::{Beta, Distribution};
use rayon::prelude::*;

use crate::approx::{PredictiveWeights, WeightForm};
use crate::error::{Error, Result};
use crate::model::{check_counts, GibbsModel, LogValue, Tilt};
use crate::quadrature::{try_integrate, try_integrate_to_infinity, Tolerance};
use crate::rng::RngStream;
use crate::special::{ln_gamma, neumaier_sum};
use crate::stable::{sample_poly_tilted_stable, stable_pdf, RejectionCounter};

/// Replicates used when none are specified.
pub const DEFAULT_REPLICATES: usize = 10_000;

/// Replicates per sub-stream.
pub const CHUNK_SIZE: usize = 1024;

/// Default largest `n` accepted by [`quadrature_v`].
pub const QUADRATURE_MAX_N: u64 = 30;

/// Default relative tolerance of [`quadrature_v`].
pub const QUADRATURE_REL_TOL: f64 = 1e-8;

/// Whether replicate chunks run on the rayon pool or on the calling thread.
/// Both give bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// A Monte Carlo estimate of `ln V_{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VEstimate {
    pub log_value: f64,
    /// Delta-method standard error of `log_value`.
    pub log_std_error: f64,
    pub m: usize,
    /// Stable proposals rejected while drawing the tilted variables.
    pub rejection_count: u64,
}

/// `ln(mean(exp(v)))` and the delta-method standard error of that logarithm,
/// `sd(w) / (√M mean(w))` with `w = exp(v - max v)`.
pub fn log_mean_exp(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::Argument("log-mean-exp of an empty sample".into()));
    }
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top.is_nan() || top == f64::INFINITY {
        return Err(Error::Invariant(format!("non-finite log replicate {top}")));
    }
    if top == f64::NEG_INFINITY {
        return Err(Error::Invariant("every replicate underflowed".into()));
    }
    let m = values.len() as f64;
    let mean = neumaier_sum(values.iter().map(|v| (v - top).exp())) / m;
    if values.len() < 2 {
        return Ok((top + mean.ln(), 0.0));
    }
    let ss = neumaier_sum(values.iter().map(|v| {
        let d = (v - top).exp() - mean;
        d * d
    }));
    let sd = (ss / (m - 1.0)).sqrt();
    Ok((top + mean.ln(), sd / (m.sqrt() * mean)))
}

fn constant_tilt(model: &GibbsModel) -> bool {
    match model.tilt() {
        Tilt::Stable => true,
        Tilt::GeneralizedGamma { tau } => *tau == 0.0,
        Tilt::PoissonDirichlet { theta } => *theta == 0.0,
        Tilt::Generic(_) => false,
    }
}

fn chunk(
    model: &GibbsModel,
    n: u64,
    k: u64,
    len: usize,
    stream: RngStream,
    prefix: f64,
) -> Result<(Vec<f64>, RejectionCounter)> {
    let a = model.alpha();
    let ka = k as f64 * a;
    let beta = Beta::new(ka, n as f64 - ka).map_err(|e| Error::Argument(e.to_string()))?;
    let order = u32::try_from(k).map_err(|_| Error::Argument(format!("k = {k} too large")))?;
    let mut rng = stream.rng();
    let mut counter = RejectionCounter::default();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let y: f64 = beta.sample(&mut rng);
        let x = sample_poly_tilted_stable(model.stable_index(), order, &mut rng, &mut counter)?;
        out.push(prefix + model.ln_h(x / y)?);
    }
    Ok((out, counter))
}

/// Monte Carlo estimate of `ln V_{n,k}` for any model from `m ≥ 2`
/// replicates.
pub fn mc_log_v(model: &GibbsModel, n: u64, k: u64, m: usize, stream: RngStream, exec: Execution) -> Result<VEstimate> {
    check_counts(n, k)?;
    if m < 2 {
        return Err(Error::Argument(format!("need at least 2 replicates, got {m}")));
    }
    let a = model.alpha();
    let prefix = (k - 1) as f64 * a.ln() + ln_gamma(k as f64) - ln_gamma(n as f64);
    if constant_tilt(model) {
        let h0 = model.ln_h(1.0)?;
        return Ok(VEstimate { log_value: prefix + h0, log_std_error: 0.0, m, rejection_count: 0 });
    }
    let chunks = m.div_ceil(CHUNK_SIZE);
    let job = |i: usize| {
        let len = CHUNK_SIZE.min(m - i * CHUNK_SIZE);
        chunk(model, n, k, len, stream.substream(i as u64), prefix)
    };
    let parts: Vec<Result<(Vec<f64>, RejectionCounter)>> = match exec {
        Execution::Sequential => (0..chunks).map(job).collect(),
        Execution::Parallel => (0..chunks).into_par_iter().map(job).collect(),
    };
    let mut values = Vec::with_capacity(m);
    let mut counter = RejectionCounter::default();
    for part in parts {
        let (v, c) = part?;
        values.extend(v);
        counter.merge(&c);
    }
    let (log_value, log_std_error) = log_mean_exp(&values)?;
    Ok(VEstimate { log_value, log_std_error, m, rejection_count: counter.rejections })
}

/// Monte Carlo estimate of `ln V_{n,k}` for the normalized generalized Gamma
/// prior.
pub fn mc_log_v_ngg(n: u64, k: u64, alpha: f64, tau: f64, m: usize, stream: RngStream) -> Result<VEstimate> {
    let model = GibbsModel::generalized_gamma(alpha, tau)?;
    mc_log_v(&model, n, k, m, stream, Execution::Parallel)
}

/// A Monte Carlo new-type weight with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McWeight {
    pub estimate: f64,
    pub std_error: f64,
    /// Estimated `V_{n+1,k} / V_{n,k}`.
    pub existing_factor: f64,
    /// False when the estimate fell outside `[0, 1]`.
    pub in_range: bool,
    pub rejection_count: u64,
}

impl McWeight {
    pub fn to_weights(self) -> PredictiveWeights {
        let mut w = PredictiveWeights::new(self.estimate, self.existing_factor, WeightForm::MonteCarlo);
        w.std_error = Some(self.std_error);
        w.out_of_range = !self.in_range;
        w
    }
}

/// Monte Carlo new-type weight `1 - (n - αk) V_{n+1,k} / V_{n,k}`, with the
/// two `V` estimates drawn on independent sub-streams.
pub fn mc_weight(model: &GibbsModel, n: u64, k: u64, m: usize, stream: RngStream, exec: Execution) -> Result<McWeight> {
    check_counts(n, k)?;
    let a = model.alpha();
    if constant_tilt(model) {
        if m < 2 {
            return Err(Error::Argument(format!("need at least 2 replicates, got {m}")));
        }
        let w = k as f64 * a / n as f64;
        return Ok(McWeight {
            estimate: w,
            std_error: 0.0,
            existing_factor: 1.0 / n as f64,
            in_range: true,
            rejection_count: 0,
        });
    }
    let next = mc_log_v(model, n + 1, k, m, stream.labelled("numerator"), exec)?;
    let here = mc_log_v(model, n, k, m, stream.labelled("denominator"), exec)?;
    let ratio = (next.log_value - here.log_value).exp();
    let mass = n as f64 - k as f64 * a;
    let estimate = 1.0 - mass * ratio;
    let std_error = mass * ratio * next.log_std_error.hypot(here.log_std_error);
    Ok(McWeight {
        estimate,
        std_error,
        existing_factor: ratio,
        in_range: (0.0..=1.0).contains(&estimate),
        rejection_count: next.rejection_count + here.rejection_count,
    })
}

/// [`mc_weight`] for the normalized generalized Gamma prior, returning the
/// estimate and its standard error.
pub fn mc_new_type_weight(n: u64, k: u64, alpha: f64, tau: f64, m: usize, stream: RngStream) -> Result<(f64, f64)> {
    let model = GibbsModel::generalized_gamma(alpha, tau)?;
    let w = mc_weight(&model, n, k, m, stream, Execution::Parallel)?;
    Ok((w.estimate, w.std_error))
}

/// `ln V_{n,k}` by adaptive quadrature of
///
/// ```text
/// V_{n,k} = α^k / Γ(n - kα) ∫_0^∞ t^{-kα} h(t) ∫_0^1 p^{n-kα-1} f_α(t(1-p)) dp dt
/// ```
///
/// for `n ≤ 30`. The inner integral is taken over `ln(t(1-p))` and the outer
/// over `ln t`.
pub fn quadrature_v(n: u64, k: u64, model: &GibbsModel, rel_tol: f64) -> Result<LogValue> {
    quadrature_v_bounded(n, k, model, rel_tol, QUADRATURE_MAX_N)
}

/// [`quadrature_v`] with an explicit bound on `n`.
pub fn quadrature_v_bounded(n: u64, k: u64, model: &GibbsModel, rel_tol: f64, max_n: u64) -> Result<LogValue> {
    check_counts(n, k)?;
    if n > max_n {
        return Err(Error::TooLarge { n, limit: max_n });
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Argument(format!("relative tolerance must be positive, got {rel_tol}")));
    }
    let alpha = model.stable_index();
    let a = alpha.get();
    let ka = k as f64 * a;
    let m = n as f64 - ka;
    let inner_tol = Tolerance::new(1e-300, (rel_tol * 1e-2).max(1e-13));
    let ln_integrand = |y: f64| -> Result<f64> {
        let t = y.exp();
        if t == 0.0 || !t.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        // ∫_0^1 p^{m-1} f(t(1-p)) dp = t^{-1} ∫ (1 - e^z/t)^{m-1} f(e^z) e^z dz over z < ln t
        let ln_t = y;
        let g = |z: f64| -> Result<f64> {
            let w = -(z - ln_t).exp_m1();
            if w <= 0.0 {
                return Ok(0.0);
            }
            let q = z.exp();
            if q == 0.0 {
                return Ok(0.0);
            }
            Ok(w.powf(m - 1.0) * stable_pdf(q, alpha)? * q)
        };
        let split = ln_t.min(0.0);
        let mut inner = try_integrate_to_infinity(|s| g(split - s), 0.0, inner_tol)?;
        if ln_t > 0.0 {
            let upper = try_integrate(g, 0.0, ln_t, inner_tol)?;
            inner.value += upper.value;
        }
        inner.value /= t;
        if inner.value <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok((1.0 - ka) * y + model.ln_h(t)? + inner.value.ln())
    };

    let mut peak = (f64::NEG_INFINITY, 0.0);
    for j in -12..=12 {
        let y = f64::from(j);
        let l = ln_integrand(y)?;
        if l > peak.0 {
            peak = (l, y);
        }
    }
    let (scale, centre) = peak;
    if !scale.is_finite() {
        return Err(Error::Quadrature { achieved: f64::INFINITY, requested: rel_tol });
    }
    let tol = Tolerance::new(0.0, rel_tol * 0.5);
    let half = |dir: f64| {
        try_integrate_to_infinity(
            |s| {
                let l = ln_integrand(centre + dir * s)?;
                Ok((l - scale).exp())
            },
            0.0,
            tol,
        )
    };
    let upper = half(1.0)?;
    let lower = half(-1.0)?;
    let total = upper.value + lower.value;
    if !(total > 0.0) {
        return Err(Error::Quadrature { achieved: f64::INFINITY, requested: rel_tol });
    }
    let ln_v = k as f64 * a.ln() - ln_gamma(m) + scale + total.ln();
    Ok(LogValue::positive(ln_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pd_log_v, stable_log_v};

    #[test]
    fn log_mean_exp_basics() {
        let (l, se) = log_mean_exp(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!((l, se), (0.0, 0.0));
        let (l, _) = log_mean_exp(&[0.0, 2.0f64.ln()]).unwrap();
        assert!((l - 1.5f64.ln()).abs() < 1e-15);
        assert!(log_mean_exp(&[]).is_err());
        assert!(log_mean_exp(&[f64::NEG_INFINITY; 3]).is_err());
    }

    #[test]
    fn log_mean_exp_shift() {
        let v: Vec<f64> = (0..100).map(|i| (f64::from(i) * 0.37).sin() * 3.0).collect();
        let (base, se) = log_mean_exp(&v).unwrap();
        for off in [500.0, -500.0] {
            let shifted: Vec<f64> = v.iter().map(|x| x + off).collect();
            let (l, s) = log_mean_exp(&shifted).unwrap();
            assert!((l - base - off).abs() < 1e-10);
            assert!((s - se).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_zero_is_exact() {
        let v = mc_log_v_ngg(7, 3, 0.5, 0.0, 100, RngStream::new(1)).unwrap();
        assert_eq!(v.log_std_error, 0.0);
        assert!((v.log_value - stable_log_v(7, 3, 0.5).unwrap().ln_abs).abs() < 1e-14);
        let (w, se) = mc_new_type_weight(10, 4, 0.5, 0.0, 100, RngStream::new(1)).unwrap();
        assert_eq!((w, se), (0.2, 0.0));
        assert!(mc_log_v_ngg(7, 3, 0.5, 1.0, 1, RngStream::new(1)).is_err());
    }

    #[test]
    fn worker_count_does_not_matter() {
        let model = GibbsModel::generalized_gamma(0.5, 1.0).unwrap();
        let s = RngStream::new(9);
        let a = mc_log_v(&model, 12, 4, 3000, s, Execution::Sequential).unwrap();
        let b = mc_log_v(&model, 12, 4, 3000, s, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quadrature_reproduces_closed_forms() {
        let st = GibbsModel::generalized_gamma(0.5, 0.0).unwrap();
        let q = quadrature_v(5, 2, &st, 1e-8).unwrap();
        assert!((q.ln_abs - (1.0f64 / 48.0).ln()).abs() < 1e-7, "{q:?}");
        let pd = GibbsModel::poisson_dirichlet(0.5, 1.0).unwrap();
        let q = quadrature_v(10, 4, &pd, 1e-8).unwrap();
        let want = pd_log_v(10, 4, 0.5, 1.0).unwrap();
        assert!((q.ratio(&want) - 1.0).abs() < 1e-6, "{q:?} vs {want:?}");
    }

    #[test]
    fn quadrature_size_guard() {
        let st = GibbsModel::stable(0.5).unwrap();
        assert!(matches!(quadrature_v(31, 2, &st, 1e-8), Err(Error::TooLarge { n: 31, limit: 30 })));
    }
}
