//! Positive α-stable laws: density, exact samplers for the plain,
//! exponentially tilted and polynomially tilted variants, and the Zeta data
//! generator.
//!
//! Throughout, the positive α-stable variable `T` is normalized so that
//! `E[exp(-s T)] = exp(-s^α)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Zeta};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Largest exponential tilt accepted by [`sample_exp_tilted_stable`].
pub const MAX_TILT: f64 = 1e8;

/// Largest expected number of stable proposals (`tilt^α`) a single tilted
/// draw may cost.
pub const MAX_TILT_COST: f64 = 1e8;

/// Stability index `α ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StableIndex(f64);

impl StableIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(domain(format!("stable index must lie in (0, 1), got {alpha}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for StableIndex {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

/// `ln A(u)` for Zolotarev's function
/// `A(u) = sin(αu)^{α/(1-α)} sin((1-α)u) / sin(u)^{1/(1-α)}`, `u ∈ (0, π)`.
#[inline]
fn ln_zolotarev(alpha: f64, u: f64) -> f64 {
    let beta = 1.0 - alpha;
    (alpha / beta) * (alpha * u).sin().ln() + (beta * u).sin().ln() - u.sin().ln() / beta
}

/// Density of the positive α-stable law at `x > 0`.
///
/// Evaluated through the single-integral representation
/// `f(x) = α/((1-α)π) x^{-1/(1-α)} ∫_0^π A(u) exp(-A(u) x^{-α/(1-α)}) du`
/// with adaptive Gauss–Kronrod quadrature. Far in the right tail, where the
/// integrand collapses onto `u = π`, the convergent expansion
/// `f(x) = π^{-1} Σ_{j≥1} (-1)^{j+1} Γ(jα+1)/j! sin(jπα) x^{-jα-1}` is summed
/// instead.
pub fn stable_pdf(x: f64, alpha: StableIndex) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(domain(format!("stable density needs x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let a = alpha.get();
    let ln_x = x.ln();
    if -a * ln_x < TAIL_SERIES_LN_THRESHOLD {
        return Ok(tail_series(a, ln_x));
    }
    let beta = 1.0 - a;
    let z = (-(a / beta) * ln_x).exp();
    let ln_pre = (a / (beta * PI)).ln() - ln_x / beta;
    let tol = Tolerance::new(1e-300, 1e-12);
    let r = integrate(
        |u| {
            let ln_a = ln_zolotarev(a, u);
            let arg = ln_pre + ln_a - ln_a.exp() * z;
            if arg < -745.0 {
                0.0
            } else {
                arg.exp()
            }
        },
        0.0,
        PI,
        tol,
    )?;
    Ok(r.value.max(0.0))
}

const TAIL_SERIES_LN_THRESHOLD: f64 = -3.0;

fn tail_series(a: f64, ln_x: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let mut sum = 0.0;
    for j in 1..200 {
        let jf = f64::from(j);
        let s = (jf * PI * a).sin();
        let mag = ln_gamma(jf * a + 1.0) - ln_gamma(jf + 1.0) - (jf * a + 1.0) * ln_x;
        let term = if j % 2 == 1 { s * mag.exp() } else { -s * mag.exp() };
        sum += term;
        if mag.exp() < 1e-18 * sum.abs() {
            break;
        }
    }
    (sum / PI).max(0.0)
}

/// Draw from the positive α-stable law (Kanter's representation).
pub fn sample_positive_stable<R: Rng + ?Sized>(alpha: StableIndex, rng: &mut R) -> f64 {
    let a = alpha.get();
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break PI * u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    (((1.0 - a) / a) * (ln_zolotarev(a, u) - e.ln())).exp()
}

/// Proposal and acceptance tallies for the tilted-stable rejection sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RejectionCounter {
    /// Stable variates proposed.
    pub proposals: u64,
    /// Stable variates rejected.
    pub rejections: u64,
    /// Tilted variates returned.
    pub draws: u64,
}

impl RejectionCounter {
    /// Returned draws per proposal.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            return f64::NAN;
        }
        self.draws as f64 / self.proposals as f64
    }

    pub fn merge(&mut self, other: &RejectionCounter) {
        self.proposals += other.proposals;
        self.rejections += other.rejections;
        self.draws += other.draws;
    }
}

/// Draw from the exponentially tilted stable law with density
/// `exp(c^α - c x) f_α(x)`.
///
/// The tilted law is infinitely divisible: it is the sum of `m` copies of a
/// rescaled tilted variable with tilt `c m^{-1/α}`. Choosing `m = ⌈c^α⌉`
/// keeps each piece's acceptance probability above `e^{-1}`, so a draw costs
/// about `e · max(1, c^α)` stable proposals.
pub fn sample_exp_tilted_stable<R: Rng + ?Sized>(
    alpha: StableIndex,
    tilt: f64,
    rng: &mut R,
    counter: &mut RejectionCounter,
) -> Result<f64> {
    if tilt.is_nan() || tilt < 0.0 {
        return Err(domain(format!("tilt must be nonnegative, got {tilt}")));
    }
    if tilt > MAX_TILT {
        return Err(Error::Argument(format!("tilt {tilt:e} exceeds the supported maximum {MAX_TILT:e}")));
    }
    tilted_unchecked(alpha, tilt, rng, counter)
}

fn tilted_unchecked<R: Rng + ?Sized>(
    alpha: StableIndex,
    tilt: f64,
    rng: &mut R,
    counter: &mut RejectionCounter,
) -> Result<f64> {
    if tilt == 0.0 {
        counter.proposals += 1;
        counter.draws += 1;
        return Ok(sample_positive_stable(alpha, rng));
    }
    let a = alpha.get();
    let cost = tilt.powf(a);
    if !(cost <= MAX_TILT_COST) {
        return Err(Error::Argument(format!("tilt {tilt:e} needs about {cost:e} proposals per draw")));
    }
    let pieces = cost.ceil().max(1.0);
    let scale = pieces.powf(-1.0 / a);
    let piece_tilt = tilt * scale;
    let mut sum = 0.0;
    for _ in 0..pieces as u64 {
        loop {
            counter.proposals += 1;
            let s = sample_positive_stable(alpha, rng);
            let u: f64 = rng.random();
            if u.ln() <= -piece_tilt * s {
                sum += s;
                break;
            }
            counter.rejections += 1;
        }
    }
    counter.draws += 1;
    Ok(scale * sum)
}

/// `ln Γ(kα+1) - ln Γ(k+1)`, the log normalizer of the polynomially tilted law.
pub fn poly_tilted_log_normalizer(alpha: StableIndex, k: u32) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let k = f64::from(k);
    ln_gamma(k * alpha.get() + 1.0) - ln_gamma(k + 1.0)
}

/// Draw from the polynomially tilted stable law with density
/// `Γ(kα+1)/Γ(k+1) x^{-kα} f_α(x)`.
///
/// Uses the Gamma mixture: with `G ~ Gamma(k, 1)` and `C = G^{1/α}`, a draw
/// from the exponentially tilted law with tilt `C` has the target law.
pub fn sample_poly_tilted_stable<R: Rng + ?Sized>(
    alpha: StableIndex,
    k: u32,
    rng: &mut R,
    counter: &mut RejectionCounter,
) -> Result<f64> {
    if k == 0 {
        return Err(domain("polynomial tilt order k must be at least 1"));
    }
    let gamma = Gamma::new(f64::from(k), 1.0).map_err(|e| Error::Argument(e.to_string()))?;
    let g: f64 = gamma.sample(rng);
    let c = g.powf(1.0 / alpha.get());
    tilted_unchecked(alpha, c, rng, counter)
}

/// Draw from the Zeta(σ) law `P(Z = z) ∝ z^{-σ}`, `z = 1, 2, …`, by exact
/// rejection from a Pareto envelope. Draws beyond `u64::MAX` saturate.
pub fn sample_zeta<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<u64> {
    Ok(ZetaSampler::new(sigma)?.sample(rng))
}

/// Reusable Zeta(σ) sampler.
#[derive(Debug, Clone, Copy)]
pub struct ZetaSampler {
    inner: Zeta<f64>,
}

impl ZetaSampler {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 1.0 {
            return Err(domain(format!("Zeta parameter must exceed 1, got {sigma}")));
        }
        let inner = Zeta::new(sigma).map_err(|e| domain(e.to_string()))?;
        Ok(Self { inner })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let z = self.inner.sample(rng);
        if z >= u64::MAX as f64 {
            u64::MAX
        } else {
            z as u64
        }
    }
}
