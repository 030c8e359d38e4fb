//! Self-checks: sampler distributions, density accuracy, closed-form
//! identities and agreement between the exact, quadrature and Monte Carlo
//! evaluations of `V_{n,k}`.

use std::fmt;
use std::time::Instant;

use gibbs_predictive::montecarlo::{mc_log_v, mc_weight, quadrature_v, Execution, QUADRATURE_REL_TOL};
use gibbs_predictive::ngg_series::{ngg_log_v_series, ngg_predictive_weight_exact};
use gibbs_predictive::quadrature::{try_integrate, Tolerance};
use gibbs_predictive::stable::{
    sample_exp_tilted_stable, sample_poly_tilted_stable, sample_positive_stable, RejectionCounter, ZetaSampler,
};
use gibbs_predictive::stats::{chi_square_gof, ks_test, mean_and_se};
use gibbs_predictive::{Error, GibbsModel, RngStream, StableIndex};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::config::{ExperimentConfig, DEFAULT_SEED};
use crate::data::{k_sequence, shared_labels};
use crate::pd::pd_rows;

/// A density under test, `(x, α) ↦ f_α(x)`.
pub type Pdf<'a> = &'a (dyn Fn(f64, StableIndex) -> gibbs_predictive::Result<f64> + Sync);

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<28} {:>8.2}s  {}", self.name, self.seconds, self.detail)
    }
}

fn timed(name: &str, body: impl FnOnce() -> Result<String, String>) -> Check {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn levy_pdf(x: f64) -> f64 {
    x.powf(-1.5) * (-0.25 / x).exp() / (2.0 * std::f64::consts::PI.sqrt())
}

/// `f_{1/2}` against the Lévy closed form on `[0.05, 20]`.
pub fn check_pdf_levy(pdf: Pdf) -> Check {
    timed("stable_pdf vs Levy", || {
        let a = StableIndex::new(0.5).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let x = 0.05 * 400f64.powf(f64::from(i) / 200.0);
            let got = pdf(x, a).map_err(|e| e.to_string())?;
            worst = worst.max(((got - levy_pdf(x)) / levy_pdf(x)).abs());
        }
        let d = format!("max relative error {worst:.2e} (limit 1e-8)");
        if worst <= 1e-8 {
            Ok(d)
        } else {
            Err(d)
        }
    })
}

/// `∫ f_α = 1` to `1e-8`.
pub fn check_pdf_normalization(pdf: Pdf, alpha: f64) -> Check {
    timed(&format!("stable_pdf mass (α={alpha})"), || {
        let a = StableIndex::new(alpha).map_err(|e| e.to_string())?;
        let tol = Tolerance::new(1e-14, 1e-12);
        // ∫_0^∞ f(x) dx = ∫ f(e^y) e^y dy; beyond y = 60 the tail holds less than 1e-15.
        let g = |y: f64| pdf(y.exp(), a).map(|f| f * y.exp());
        let mass = try_integrate(g, -30.0, 60.0, tol).map_err(|e| e.to_string())?.value;
        let d = format!("mass {mass:.12} (limit |mass-1| ≤ 1e-8)");
        if (mass - 1.0).abs() <= 1e-8 {
            Ok(d)
        } else {
            Err(d)
        }
    })
}

/// Empirical Laplace transforms of the tilted stable sampler against
/// `exp(c^α - (c+s)^α)`, each within 4 standard errors.
pub fn check_laplace(alphas: &[f64], tilts: &[f64], ss: &[f64], draws: usize, seed: u64) -> Check {
    timed("tilted Laplace transforms", || {
        let mut worst: f64 = 0.0;
        let mut cases = 0;
        for &alpha in alphas {
            let a = StableIndex::new(alpha).map_err(|e| e.to_string())?;
            for &c in tilts {
                let mut rng = RngStream::new(seed).labelled(&format!("laplace/{alpha}/{c}")).rng();
                let mut counter = RejectionCounter::default();
                let xs: Vec<f64> = (0..draws)
                    .map(|_| sample_exp_tilted_stable(a, c, &mut rng, &mut counter))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                for &s in ss {
                    let vals: Vec<f64> = xs.iter().map(|x| (-s * x).exp()).collect();
                    let (mean, se) = mean_and_se(&vals);
                    let want = (c.powf(alpha) - (c + s).powf(alpha)).exp();
                    let z = (mean - want).abs() / se;
                    worst = worst.max(z);
                    cases += 1;
                    if z > 4.0 {
                        return Err(format!("α={alpha} c={c} s={s}: mean {mean:.6} vs {want:.6}, |z| = {z:.2}"));
                    }
                }
            }
        }
        Ok(format!("{cases} cases, N={draws}, max |z| {worst:.2} (limit 4)"))
    })
}

/// `E[X^{-α}] = Γ(kα+1)Γ(k+2) / (Γ(k+1)Γ((k+1)α+1))` for the polynomially
/// tilted sampler, within 4 standard errors.
pub fn check_poly_moments(alphas: &[f64], ks: &[u32], draws: usize, seed: u64) -> Check {
    timed("poly-tilted moments", || {
        let mut worst: f64 = 0.0;
        for &alpha in alphas {
            let a = StableIndex::new(alpha).map_err(|e| e.to_string())?;
            for &k in ks {
                let kf = f64::from(k);
                let want = (ln_gamma(kf * alpha + 1.0) + ln_gamma(kf + 2.0)
                    - ln_gamma(kf + 1.0)
                    - ln_gamma((kf + 1.0) * alpha + 1.0))
                .exp();
                let mut rng = RngStream::new(seed).labelled(&format!("poly/{alpha}/{k}")).rng();
                let mut counter = RejectionCounter::default();
                let vals: Vec<f64> = (0..draws)
                    .map(|_| sample_poly_tilted_stable(a, k, &mut rng, &mut counter).map(|x| x.powf(-alpha)))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                let (mean, se) = mean_and_se(&vals);
                let z = (mean - want).abs() / se;
                worst = worst.max(z);
                if z > 4.0 {
                    return Err(format!("α={alpha} k={k}: mean {mean:.6} vs {want:.6}, |z| = {z:.2}"));
                }
            }
        }
        Ok(format!("{} cases, N={draws}, max |z| {worst:.2} (limit 4)", alphas.len() * ks.len()))
    })
}

/// Kolmogorov–Smirnov test of the α = 1/2 sampler against the Lévy cdf
/// `erfc(1/(2√x))` at level 0.01.
pub fn check_levy_ks(draws: usize, seed: u64) -> Check {
    timed("stable sampler KS (α=0.5)", || {
        let a = StableIndex::new(0.5).map_err(|e| e.to_string())?;
        let mut rng = RngStream::new(seed).labelled("ks").rng();
        let xs: Vec<f64> = (0..draws).map(|_| sample_positive_stable(a, &mut rng)).collect();
        let (d, p) = ks_test(&xs, |x| erfc(0.5 / x.sqrt()));
        let msg = format!("N={draws}, D={d:.4}, p={p:.3} (level 0.01)");
        if p > 0.01 {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

/// Chi-square fit of Zeta(σ) draws on `{1, …, 50}` at level 0.01, and the
/// ratio `P(2)/P(1) = 2^{-σ}` within 4 standard errors.
pub fn check_zeta(sigma: f64, draws: usize, seed: u64) -> Check {
    timed("zeta sampler", || {
        let z = ZetaSampler::new(sigma).map_err(|e| e.to_string())?;
        let mut rng = RngStream::new(seed).labelled("zeta").rng();
        let mut counts = vec![0u64; 50];
        for _ in 0..draws {
            let v = z.sample(&mut rng);
            if v <= 50 {
                counts[v as usize - 1] += 1;
            }
        }
        let w: Vec<f64> = (1..=50).map(|i| f64::from(i).powf(-sigma)).collect();
        let total: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
        let (stat, df, p) = chi_square_gof(&counts, &probs).map_err(|e| e.to_string())?;
        let (c1, c2) = (counts[0] as f64, counts[1] as f64);
        let ratio = c2 / c1;
        let se = ratio * (1.0 / c1 + 1.0 / c2).sqrt();
        let want = 2f64.powf(-sigma);
        let z = (ratio - want).abs() / se;
        let msg =
            format!("N={draws}, χ²={stat:.1} on {df} df, p={p:.3}; P(2)/P(1)={ratio:.5} vs {want:.5}, |z|={z:.2}");
        if p > 0.01 && z <= 4.0 {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

/// Poisson–Dirichlet error identities and rational-form exactness along a
/// trajectory, for every `(α, θ)` of the grid.
pub fn check_pd_identities(alphas: &[f64], thetas: &[f64], ks: &[u64]) -> Check {
    timed("PD identities", || {
        let (mut e1, mut e2, mut e3): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for &a in alphas {
            for &theta in thetas {
                for r in pd_rows(a, theta, ks).map_err(|e| e.to_string())? {
                    let (n, k) = (r.n as f64, r.k as f64);
                    e1 = e1.max((r.err_first() - theta * (n - k * a) / (n * (theta + n))).abs());
                    e2 = e2.max((r.err_second() + theta * (k * a + theta) / (n * (theta + n))).abs());
                    e3 = e3.max(((r.second_rational - r.exact) / r.exact).abs());
                }
            }
        }
        let msg = format!("max deviations {e1:.1e}, {e2:.1e}, rational {e3:.1e} (limit 1e-12)");
        if e1.max(e2).max(e3) <= 1e-12 {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

/// One point of the agreement check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrianglePoint {
    pub alpha: f64,
    pub tau: f64,
    pub n: u64,
    pub k: u64,
}

/// Series against quadrature (relative `1e-6`) and Monte Carlo against
/// quadrature (3 standard errors) for `ln V_{n,k}`.
pub fn check_triangle(points: &[TrianglePoint], m: usize, digits: u32, seed: u64) -> Check {
    timed("series/quadrature/MC", || {
        let (mut worst_rel, mut worst_z): (f64, f64) = (0.0, 0.0);
        for p in points {
            let model = GibbsModel::generalized_gamma(p.alpha, p.tau).map_err(|e| e.to_string())?;
            let q = quadrature_v(p.n, p.k, &model, QUADRATURE_REL_TOL).map_err(|e| e.to_string())?;
            let s = ngg_log_v_series(p.n, p.k, p.alpha, p.tau, digits).map_err(|e| e.to_string())?;
            let stream = RngStream::new(seed).labelled(&format!("triangle/{}/{}/{}", p.alpha, p.tau, p.n));
            let mc = mc_log_v(&model, p.n, p.k, m, stream, Execution::Parallel).map_err(|e| e.to_string())?;
            let rel = (s.ln_abs - q.ln_abs).exp_m1().abs();
            let z = (mc.log_value - q.ln_abs).abs() / mc.log_std_error;
            worst_rel = worst_rel.max(rel);
            worst_z = worst_z.max(z);
            if rel > 1e-6 || z > 3.0 {
                return Err(format!("{p:?}: series rel {rel:.2e}, MC |z| {z:.2}"));
            }
        }
        Ok(format!(
            "{} points, M={m}: max series rel {worst_rel:.1e} (1e-6), max MC |z| {worst_z:.2} (3)",
            points.len()
        ))
    })
}

/// Outcome of the precision comparison at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityRow {
    pub n: u64,
    pub k: u64,
    pub low: Result<f64, Error>,
    pub high: Result<f64, Error>,
    pub mc: Option<(f64, f64)>,
}

/// The series weight at `(α, τ) = (0.5, 10)` for each `n` of `ns` at 15 and
/// 50 digits, with a Monte Carlo reference when `m > 0`.
pub fn instability_rows(ks: &[u64], ns: &[u64], m: usize, seed: u64) -> Result<Vec<InstabilityRow>, String> {
    let model = GibbsModel::generalized_gamma(0.5, 10.0).map_err(|e| e.to_string())?;
    let stream = RngStream::new(seed).labelled("instability");
    ns.iter()
        .map(|&n| {
            let k = ks[n as usize - 1];
            let mc = if m > 0 {
                let w =
                    mc_weight(&model, n, k, m, stream.substream(n), Execution::Parallel).map_err(|e| e.to_string())?;
                Some((w.estimate, w.std_error))
            } else {
                None
            };
            Ok(InstabilityRow {
                n,
                k,
                low: ngg_predictive_weight_exact(n, k, 0.5, 10.0, 15),
                high: ngg_predictive_weight_exact(n, k, 0.5, 10.0, 50),
                mc,
            })
        })
        .collect()
}

pub fn check_instability(ks: &[u64], ns: &[u64], m: usize, seed: u64) -> Check {
    timed("series instability", || {
        let rows = instability_rows(ks, ns, m, seed)?;
        let flagged = rows
            .iter()
            .filter(|r| matches!(r.low, Err(Error::PrecisionInsufficient { .. } | Error::OutOfRange { .. })))
            .count();
        let mut worst: f64 = 0.0;
        for r in &rows {
            let v = match &r.high {
                Ok(v) if *v > 0.0 && *v < 1.0 => *v,
                other => return Err(format!("n={}: 50 digits gave {other:?}", r.n)),
            };
            if let Some((est, se)) = r.mc {
                let z = (est - v).abs() / se;
                worst = worst.max(z);
                if z > 3.0 {
                    return Err(format!("n={}: series {v:.6} vs MC {est:.6} ± {se:.1e}", r.n));
                }
            }
        }
        let msg =
            format!("{flagged}/{} flagged at 15 digits; 50 digits all in (0,1), max MC |z| {worst:.2}", rows.len());
        if flagged > 0 {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    pub quick: bool,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { quick: false, seed: DEFAULT_SEED }
    }
}

/// `k_n` along the default shared Zeta(1.5) trajectory of length `n_max`.
pub fn default_ks(seed: u64, n_max: u64) -> Vec<u64> {
    let cfg = ExperimentConfig { seed, n_max, ..Default::default() };
    let labels = shared_labels(&cfg).ok().flatten().unwrap_or_default();
    k_sequence(&labels)
}

/// Run every check. The density under test is only used by the density
/// checks, so a corrupted `pdf` must make the suite fail.
pub fn run_validation(opts: ValidateOptions, pdf: Pdf) -> Vec<Check> {
    let seed = opts.seed;
    let ks = default_ks(seed, 500);
    let grid = [0.25, 0.5, 0.75];
    let params = [1.0, 3.0, 10.0];
    let mut checks = vec![check_pdf_levy(pdf), check_pdf_normalization(pdf, 0.75)];
    if opts.quick {
        checks.push(check_laplace(&[0.5], &[0.0, 1.0, 3.0], &[0.5, 1.0, 2.0], 20_000, seed));
        checks.push(check_poly_moments(&[0.5], &[1, 2], 20_000, seed));
        checks.push(check_levy_ks(5_000, seed));
        checks.push(check_zeta(1.5, 20_000, seed));
        checks.push(check_pd_identities(&grid, &params, &ks));
        let p = TrianglePoint { alpha: 0.5, tau: 1.0, n: 10, k: ks[9] };
        checks.push(check_triangle(&[p], 10_000, 50, seed));
        checks.push(check_instability(&ks, &[80, 90, 100], 0, seed));
    } else {
        checks.push(check_laplace(&grid, &[0.0, 1.0, 3.0], &[0.5, 1.0, 2.0], 100_000, seed));
        checks.push(check_poly_moments(&grid, &[1, 2, 5], 100_000, seed));
        checks.push(check_levy_ks(100_000, seed));
        checks.push(check_zeta(1.5, 100_000, seed));
        checks.push(check_pd_identities(&grid, &params, &ks));
        let mut points = Vec::new();
        for &alpha in &grid {
            for tau in [1.0, 3.0] {
                for n in [10u64, 20, 30] {
                    points.push(TrianglePoint { alpha, tau, n, k: ks[n as usize - 1] });
                }
            }
        }
        checks.push(check_triangle(&points, 100_000, 50, seed));
        let ns: Vec<u64> = (60..=100).collect();
        checks.push(check_instability(&ks, &ns, 10_000, seed));
    }
    checks
}
