//! Gibbs-type prior specifications and the closed-form weights `V_{n,k}`.
//!
//! A prior is a stability index `α ∈ (0, 1)` together with a tilting function
//! `h` reweighting the total mass of the α-stable subordinator. The
//! Poisson–Dirichlet, normalized generalized Gamma and normalized stable
//! priors have closed-form `h`; any other positive, differentiable `h` can be
//! supplied as a [`GenericTilt`].

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::special::{ln_gamma, neumaier_sum};
use crate::stable::StableIndex;

/// A real function handle, `t ↦ h(t)` or `t ↦ h'(t)`.
pub type TiltFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied tilting function together with its derivative.
#[derive(Clone)]
pub struct GenericTilt {
    h: TiltFn,
    h_prime: TiltFn,
}

impl GenericTilt {
    pub fn new(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { h: Arc::new(h), h_prime: Arc::new(h_prime) }
    }

    fn eval(&self, t: f64) -> Result<f64> {
        let h = (self.h)(t);
        if h.is_nan() || h <= 0.0 {
            return Err(domain(format!("tilting function must be positive, h({t}) = {h}")));
        }
        Ok(h)
    }
}

impl fmt::Debug for GenericTilt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GenericTilt(..)")
    }
}

/// The tilting function `h` of a Gibbs-type prior.
#[derive(Debug, Clone)]
pub enum Tilt {
    /// Two-parameter Poisson–Dirichlet: `h(t) = Γ(θ+1)/Γ(θ/α+1) t^{-θ}`, `θ > -α`.
    PoissonDirichlet {
        theta: f64,
    },
    /// Normalized generalized Gamma: `h(t) = exp(τ^α - τ t)`, `τ ≥ 0`.
    GeneralizedGamma {
        tau: f64,
    },
    /// Normalized α-stable: `h ≡ 1`.
    Stable,
    Generic(GenericTilt),
}

/// A Gibbs-type prior with `α ∈ (0, 1)`.
#[derive(Debug, Clone)]
pub struct GibbsModel {
    alpha: StableIndex,
    tilt: Tilt,
}

impl GibbsModel {
    pub fn new(alpha: f64, tilt: Tilt) -> Result<Self> {
        let alpha = StableIndex::new(alpha)?;
        match tilt {
            Tilt::PoissonDirichlet { theta } if !(theta.is_finite() && theta > -alpha.get()) => {
                return Err(domain(format!("Poisson–Dirichlet needs θ > -α, got θ = {theta}, α = {}", alpha.get())));
            }
            Tilt::GeneralizedGamma { tau } if !(tau.is_finite() && tau >= 0.0) => {
                return Err(domain(format!("generalized Gamma needs τ ≥ 0, got {tau}")));
            }
            _ => {}
        }
        Ok(Self { alpha, tilt })
    }

    pub fn poisson_dirichlet(alpha: f64, theta: f64) -> Result<Self> {
        Self::new(alpha, Tilt::PoissonDirichlet { theta })
    }

    pub fn generalized_gamma(alpha: f64, tau: f64) -> Result<Self> {
        Self::new(alpha, Tilt::GeneralizedGamma { tau })
    }

    pub fn stable(alpha: f64) -> Result<Self> {
        Self::new(alpha, Tilt::Stable)
    }

    pub fn generic(
        alpha: f64,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(alpha, Tilt::Generic(GenericTilt::new(h, h_prime)))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.get()
    }

    pub fn stable_index(&self) -> StableIndex {
        self.alpha
    }

    pub fn tilt(&self) -> &Tilt {
        &self.tilt
    }

    /// `φ_h(t) = -t h'(t) / h(t)`.
    pub fn phi_h(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t <= 0.0 {
            return Err(domain(format!("φ_h needs t > 0, got {t}")));
        }
        Ok(match &self.tilt {
            Tilt::PoissonDirichlet { theta } => *theta,
            Tilt::GeneralizedGamma { tau } => tau * t,
            Tilt::Stable => 0.0,
            Tilt::Generic(g) => {
                let h = g.eval(t)?;
                -t * (g.h_prime)(t) / h
            }
        })
    }

    /// `ln h(t)` for `t > 0`.
    pub fn ln_h(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t <= 0.0 {
            return Err(domain(format!("h needs t > 0, got {t}")));
        }
        let a = self.alpha();
        Ok(match &self.tilt {
            Tilt::PoissonDirichlet { theta } => ln_gamma(theta + 1.0) - ln_gamma(theta / a + 1.0) - theta * t.ln(),
            Tilt::GeneralizedGamma { tau } => tau.powf(a) - tau * t,
            Tilt::Stable => 0.0,
            Tilt::Generic(g) => g.eval(t)?.ln(),
        })
    }

    /// Short label used in file names and reports, e.g. `pd_0.5_3`.
    pub fn label(&self) -> String {
        match &self.tilt {
            Tilt::PoissonDirichlet { theta } => format!("pd_{}_{}", self.alpha(), theta),
            Tilt::GeneralizedGamma { tau } => format!("ngg_{}_{}", self.alpha(), tau),
            Tilt::Stable => format!("stable_{}", self.alpha()),
            Tilt::Generic(_) => format!("generic_{}", self.alpha()),
        }
    }
}

/// A real number stored as `sign · exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub sign: i8,
}

impl LogValue {
    pub fn positive(ln_abs: f64) -> Self {
        Self { ln_abs, sign: 1 }
    }

    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    /// `self / other` for two positive values.
    pub fn ratio(&self, other: &LogValue) -> f64 {
        debug_assert!(self.sign > 0 && other.sign > 0);
        (self.ln_abs - other.ln_abs).exp()
    }
}

pub(crate) fn check_counts(n: u64, k: u64) -> Result<()> {
    if k < 1 || k > n {
        return Err(domain(format!("need 1 ≤ k ≤ n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// `ln V_{n,k}` for the Poisson–Dirichlet prior,
/// `V_{n,k} = ∏_{i<k} (θ + iα) / (θ)_n`.
///
/// The `i = 0` factor `θ` cancels the first factor of `(θ)_n`, so the sum runs
/// over strictly positive factors even for `θ ∈ (-α, 0]`.
pub fn pd_log_v(n: u64, k: u64, alpha: f64, theta: f64) -> Result<LogValue> {
    check_counts(n, k)?;
    let alpha = StableIndex::new(alpha)?;
    if !(theta.is_finite() && theta > -alpha.get()) {
        return Err(domain(format!("Poisson–Dirichlet needs θ > -α, got {theta}")));
    }
    let a = alpha.get();
    let num = (1..k).map(|i| (theta + i as f64 * a).ln());
    let den = (1..n).map(|j| -(theta + j as f64).ln());
    Ok(LogValue::positive(neumaier_sum(num.chain(den))))
}

/// `ln V_{n,k}` for the normalized α-stable prior, `α^{k-1} Γ(k) / Γ(n)`.
pub fn stable_log_v(n: u64, k: u64, alpha: f64) -> Result<LogValue> {
    check_counts(n, k)?;
    let a = StableIndex::new(alpha)?.get();
    Ok(LogValue::positive((k - 1) as f64 * a.ln() + ln_gamma(k as f64) - ln_gamma(n as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_closed_forms() {
        let pd = GibbsModel::poisson_dirichlet(0.5, 3.0).unwrap();
        assert_eq!(pd.phi_h(7.0).unwrap(), 3.0);
        let ngg = GibbsModel::generalized_gamma(0.5, 2.0).unwrap();
        assert_eq!(ngg.phi_h(5.0).unwrap(), 10.0);
        let st = GibbsModel::stable(0.3).unwrap();
        assert_eq!(st.phi_h(123.0).unwrap(), 0.0);
        assert!(pd.phi_h(0.0).is_err());
    }

    #[test]
    fn generic_phi_matches_pd() {
        let (a, theta) = (0.4, 2.5);
        let c = (ln_gamma(theta + 1.0) - ln_gamma(theta / a + 1.0)).exp();
        let g =
            GibbsModel::generic(a, move |t| c * t.powf(-theta), move |t| -theta * c * t.powf(-theta - 1.0)).unwrap();
        for t in [0.1, 1.0, 3.7, 50.0] {
            assert!((g.phi_h(t).unwrap() - theta).abs() < 1e-12);
            let pd = GibbsModel::poisson_dirichlet(a, theta).unwrap();
            assert!((g.ln_h(t).unwrap() - pd.ln_h(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_rejects_nonpositive_h() {
        let g = GibbsModel::generic(0.5, |t| 1.0 - t, |_| -1.0).unwrap();
        assert!(g.phi_h(0.5).is_ok());
        assert!(g.phi_h(2.0).is_err());
    }

    #[test]
    fn model_domains() {
        assert!(GibbsModel::poisson_dirichlet(0.5, -0.5).is_err());
        assert!(GibbsModel::poisson_dirichlet(0.5, -0.49).is_ok());
        assert!(GibbsModel::generalized_gamma(0.5, -1.0).is_err());
        assert!(GibbsModel::stable(1.0).is_err());
    }

    #[test]
    fn pd_small_cases() {
        assert_eq!(pd_log_v(1, 1, 0.5, 1.0).unwrap().ln_abs, 0.0);
        let v = pd_log_v(2, 1, 0.5, 1.0).unwrap();
        assert!((v.ln_abs - 0.5f64.ln()).abs() < 1e-15);
        assert!(pd_log_v(3, 4, 0.5, 1.0).is_err());
        assert!(pd_log_v(3, 0, 0.5, 1.0).is_err());
        assert!(pd_log_v(3, 2, 0.5, -0.6).is_err());
    }

    #[test]
    fn pd_theta_zero_is_stable() {
        for (n, k) in [(1, 1), (5, 2), (40, 13)] {
            let pd = pd_log_v(n, k, 0.3, 0.0).unwrap();
            let st = stable_log_v(n, k, 0.3).unwrap();
            assert!((pd.ln_abs - st.ln_abs).abs() < 1e-11, "{n} {k}");
        }
    }

    #[test]
    fn pd_negative_theta_is_positive() {
        let v = pd_log_v(10, 3, 0.5, -0.3).unwrap();
        assert_eq!(v.sign, 1);
        assert!(v.value() > 0.0);
    }
}
