//! Partition bookkeeping and the one-step predictive rule.
//!
//! Given `n` observations with `k` distinct types of frequencies `n_1, …, n_k`,
//! the next observation is a new type with probability
//! `V_{n+1,k+1} / V_{n,k}` and equals existing type `i` with probability
//! `(n_i - α) V_{n+1,k} / V_{n,k}`. The base measure is nonatomic, so a new
//! type is simply a label not seen before.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use rand::Rng;

use crate::approx::{first_order_weights, second_order_weights, PredictiveWeights, SecondOrderForm, WeightForm};
use crate::error::{domain, Error, Result};
use crate::model::{check_counts, GibbsModel, Tilt};
use crate::montecarlo::{mc_weight, quadrature_v_bounded, Execution, QUADRATURE_MAX_N, QUADRATURE_REL_TOL};
use crate::ngg_series::{ngg_exact_weights, DEFAULT_PRECISION_DIGITS};
use crate::rng::RngStream;
use crate::stable::ZetaSampler;

/// Sufficient statistics of a sample: type labels in order of first
/// appearance and their frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionState<L: Eq + Hash + Clone = u64> {
    n: u64,
    frequencies: Vec<u64>,
    labels: Vec<L>,
    index: HashMap<L, usize>,
}

impl<L: Eq + Hash + Clone> Default for PartitionState<L> {
    fn default() -> Self {
        Self { n: 0, frequencies: Vec::new(), labels: Vec::new(), index: HashMap::new() }
    }
}

impl<L: Eq + Hash + Clone> PartitionState<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_labels<I: IntoIterator<Item = L>>(labels: I) -> Self {
        let mut s = Self::new();
        for l in labels {
            s.push(l);
        }
        s
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.frequencies.len() as u64
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequencies
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn frequency(&self, label: &L) -> u64 {
        self.index.get(label).map_or(0, |&i| self.frequencies[i])
    }

    /// Record one observation; returns `true` if it is a new type.
    pub fn push(&mut self, label: L) -> bool {
        self.n += 1;
        match self.index.get(&label) {
            Some(&i) => {
                self.frequencies[i] += 1;
                false
            }
            None => {
                self.index.insert(label.clone(), self.labels.len());
                self.labels.push(label);
                self.frequencies.push(1);
                true
            }
        }
    }

    pub fn observe(mut self, obs: Observation<L>) -> Self {
        self.push(obs.label);
        self
    }

    /// Frequencies in decreasing order.
    pub fn sorted_frequencies(&self) -> Vec<u64> {
        let mut f = self.frequencies.clone();
        f.sort_unstable_by(|a, b| b.cmp(a));
        f
    }
}

impl PartitionState<u64> {
    /// A label not yet present.
    pub fn fresh_label(&self) -> u64 {
        self.labels.iter().copied().max().map_or(1, |m| m + 1)
    }
}

/// One observed label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Observation<L = u64> {
    pub label: L,
}

impl<L> Observation<L> {
    pub fn new(label: L) -> Self {
        Self { label }
    }
}

/// How predictive weights are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Closed form for Poisson–Dirichlet and stable priors, extended-precision
    /// series for generalized Gamma priors, quadrature otherwise.
    Exact,
    First,
    SecondRational,
    SecondExpanded,
    /// Monte Carlo with the given number of replicates.
    Mc(usize),
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::First => f.write_str("first"),
            Backend::SecondRational => f.write_str("second_rational"),
            Backend::SecondExpanded => f.write_str("second_expanded"),
            Backend::Mc(m) => write!(f, "mc({m})"),
        }
    }
}

/// Numerical settings shared by the backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Decimal digits for the generalized Gamma series.
    pub precision_digits: u32,
    /// Largest `n` for which generic priors use quadrature.
    pub quadrature_max_n: u64,
    pub quadrature_rel_tol: f64,
    /// Stream for Monte Carlo backends.
    pub stream: RngStream,
    pub execution: Execution,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            precision_digits: DEFAULT_PRECISION_DIGITS,
            quadrature_max_n: QUADRATURE_MAX_N,
            quadrature_rel_tol: QUADRATURE_REL_TOL,
            stream: RngStream::new(0),
            execution: Execution::Parallel,
        }
    }
}

/// Exact predictive weights at `(n, k)`.
pub fn exact_weights(model: &GibbsModel, n: u64, k: u64, settings: &Settings) -> Result<PredictiveWeights> {
    check_counts(n, k)?;
    let a = model.alpha();
    let (nf, kf) = (n as f64, k as f64);
    let (new_mass, factor) = match model.tilt() {
        Tilt::PoissonDirichlet { theta } => ((theta + kf * a) / (theta + nf), 1.0 / (theta + nf)),
        Tilt::Stable => (kf * a / nf, 1.0 / nf),
        Tilt::GeneralizedGamma { tau } => ngg_exact_weights(n, k, a, *tau, settings.precision_digits)?,
        Tilt::Generic(_) => {
            let tol = settings.quadrature_rel_tol;
            let next = quadrature_v_bounded(n + 1, k, model, tol, settings.quadrature_max_n)?;
            let here = quadrature_v_bounded(n, k, model, tol, settings.quadrature_max_n)?;
            let r = next.ratio(&here);
            (1.0 - (nf - kf * a) * r, r)
        }
    };
    Ok(PredictiveWeights::new(new_mass, factor, WeightForm::Exact))
}

/// Predictive weights at `(n, k)` from the chosen backend.
pub fn weights_at(
    model: &GibbsModel,
    n: u64,
    k: u64,
    backend: Backend,
    settings: &Settings,
) -> Result<PredictiveWeights> {
    match backend {
        Backend::Exact => exact_weights(model, n, k, settings),
        Backend::First => first_order_weights(model, n, k),
        Backend::SecondRational => second_order_weights(model, n, k, SecondOrderForm::Rational),
        Backend::SecondExpanded => second_order_weights(model, n, k, SecondOrderForm::Expanded),
        Backend::Mc(m) => mc_weight(model, n, k, m, settings.stream, settings.execution).map(|w| w.to_weights()),
    }
}

/// Predictive weights for the next observation after `state`.
pub fn predictive_weights<L: Eq + Hash + Clone>(
    model: &GibbsModel,
    state: &PartitionState<L>,
    backend: Backend,
    settings: &Settings,
) -> Result<PredictiveWeights> {
    if state.n() == 0 {
        return Err(domain("predictive weights need at least one observation"));
    }
    weights_at(model, state.n(), state.k(), backend, settings)
}

/// Where the next observation comes from, as an index into the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    New,
    Existing(usize),
}

/// Tolerance on `new_mass + (n - kα) existing_factor - 1` accepted by
/// [`sample_next`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Draw which type the next observation belongs to.
pub fn sample_draw<L: Eq + Hash + Clone, R: Rng + ?Sized>(
    state: &PartitionState<L>,
    alpha: f64,
    weights: &PredictiveWeights,
    rng: &mut R,
) -> Result<Draw> {
    let defect = weights.normalization_defect(state.n(), state.k(), alpha);
    if !(defect.abs() <= NORMALIZATION_TOL) {
        return Err(Error::Argument(format!("predictive weights are not normalized (defect {defect:e})")));
    }
    let u: f64 = rng.random();
    if u < weights.new_mass || state.k() == 0 {
        return Ok(Draw::New);
    }
    let mut target = (u - weights.new_mass) / weights.existing_factor;
    for (i, &f) in state.frequencies().iter().enumerate() {
        let mass = f as f64 - alpha;
        if mass <= 0.0 {
            return Err(Error::Invariant(format!("type {i} has frequency {f} ≤ α")));
        }
        target -= mass;
        if target < 0.0 {
            return Ok(Draw::Existing(i));
        }
    }
    Ok(Draw::Existing(state.frequencies().len() - 1))
}

/// Draw the next observation; new types receive [`PartitionState::fresh_label`].
pub fn sample_next<R: Rng + ?Sized>(
    state: &PartitionState<u64>,
    alpha: f64,
    weights: &PredictiveWeights,
    rng: &mut R,
) -> Result<Observation> {
    Ok(match sample_draw(state, alpha, weights, rng)? {
        Draw::New => Observation::new(state.fresh_label()),
        Draw::Existing(i) => Observation::new(state.labels()[i]),
    })
}

/// Source of the observation stream fed to [`run_trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Independent Zeta(σ) draws.
    Zeta(f64),
    /// Draws from the model's own predictive rule under the first requested
    /// backend.
    Urn,
    /// A fixed label sequence.
    Labels(Vec<u64>),
}

/// `len` Zeta(σ) labels drawn from `stream`.
pub fn zeta_labels(sigma: f64, len: usize, stream: RngStream) -> Result<Vec<u64>> {
    let z = ZetaSampler::new(sigma)?;
    let mut rng = stream.rng();
    Ok((0..len).map(|_| z.sample(&mut rng)).collect())
}

/// One row of a trajectory: the state after `n` observations and the
/// predictive weights for observation `n + 1` under each backend.
#[derive(Debug, Clone)]
pub struct TrajectoryRow {
    pub n: u64,
    pub k: u64,
    pub weights: Vec<Result<PredictiveWeights>>,
}

/// Feed `n_max` observations one at a time and evaluate every backend after
/// each. Monte Carlo backends at step `n` use sub-stream `n` of
/// `settings.stream`; Zeta and urn draws use the `"data"` child of `stream`.
pub fn run_trajectory(
    model: &GibbsModel,
    source: &DataSource,
    n_max: u64,
    backends: &[Backend],
    settings: &Settings,
    stream: RngStream,
) -> Result<Vec<TrajectoryRow>> {
    if n_max == 0 {
        return Err(domain("trajectory length must be at least 1"));
    }
    if backends.is_empty() {
        return Err(Error::Argument("no backends requested".into()));
    }
    let data_stream = stream.labelled("data");
    let fixed = match source {
        DataSource::Zeta(sigma) => Some(zeta_labels(*sigma, n_max as usize, data_stream)?),
        DataSource::Labels(l) => {
            if (l.len() as u64) < n_max {
                return Err(Error::Argument(format!("{} labels supplied, {n_max} requested", l.len())));
            }
            Some(l[..n_max as usize].to_vec())
        }
        DataSource::Urn => None,
    };
    let mut rng = data_stream.rng();
    let mut state = PartitionState::<u64>::new();
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut pending: Option<PredictiveWeights> = None;
    for step in 0..n_max as usize {
        let label = match &fixed {
            Some(l) => l[step],
            None => match pending {
                Some(w) => sample_next(&state, model.alpha(), &w, &mut rng)?.label,
                None => state.fresh_label(),
            },
        };
        state.push(label);
        let step_settings = Settings { stream: settings.stream.substream(state.n()), ..*settings };
        let weights: Vec<Result<PredictiveWeights>> =
            backends.iter().map(|&b| weights_at(model, state.n(), state.k(), b, &step_settings)).collect();
        if fixed.is_none() {
            pending = Some(weights[0].clone()?);
        }
        rows.push(TrajectoryRow { n: state.n(), k: state.k(), weights });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observe_paths() {
        let s = PartitionState::new().observe(Observation::new("a"));
        assert_eq!((s.n(), s.k(), s.frequencies()), (1, 1, &[1][..]));
        let s = PartitionState::from_labels(["a", "a", "b"]).observe(Observation::new("b"));
        assert_eq!((s.n(), s.k(), s.frequencies()), (4, 2, &[2, 2][..]));
        assert_eq!(s.frequency(&"b"), 2);
        assert_eq!(s.frequency(&"c"), 0);
    }

    #[test]
    fn exact_pd_weights() {
        let pd = GibbsModel::poisson_dirichlet(0.5, 1.0).unwrap();
        let w = exact_weights(&pd, 10, 4, &Settings::default()).unwrap();
        assert!((w.new_mass - 3.0 / 11.0).abs() < 1e-15);
        assert!((w.existing_factor - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_rejects_unnormalized() {
        let s = PartitionState::from_labels([1u64, 1, 2]);
        let w = PredictiveWeights::new(0.5, 0.5, WeightForm::Exact);
        let mut rng = RngStream::new(1).rng();
        assert!(sample_next(&s, 0.5, &w, &mut rng).is_err());
    }

    #[test]
    fn certain_new_type() {
        let s = PartitionState::from_labels([3u64, 3, 8]);
        let w = PredictiveWeights::new(1.0, 0.0, WeightForm::Exact);
        let mut rng = RngStream::new(1).rng();
        for _ in 0..100 {
            assert_eq!(sample_next(&s, 0.5, &w, &mut rng).unwrap().label, 9);
        }
    }

    #[test]
    fn single_step_trajectory() {
        let pd = GibbsModel::poisson_dirichlet(0.5, 1.0).unwrap();
        let rows =
            run_trajectory(&pd, &DataSource::Zeta(1.5), 1, &[Backend::Exact], &Settings::default(), RngStream::new(3))
                .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].n, rows[0].k), (1, 1));
        assert!((rows[0].weights[0].as_ref().unwrap().new_mass - 0.75).abs() < 1e-15);
    }

    #[test]
    fn generic_exact_uses_quadrature() {
        let (a, theta) = (0.5, 1.0);
        let c = (crate::special::ln_gamma(theta + 1.0) - crate::special::ln_gamma(theta / a + 1.0)).exp();
        let g = GibbsModel::generic(a, move |t| c / t, move |t| -c / (t * t)).unwrap();
        let w = exact_weights(&g, 6, 3, &Settings::default()).unwrap();
        assert!((w.new_mass - 2.5 / 7.0).abs() < 1e-6, "{w:?}");
        let far = exact_weights(&g, 40, 3, &Settings::default());
        assert!(matches!(far, Err(Error::TooLarge { .. })));
    }
}
