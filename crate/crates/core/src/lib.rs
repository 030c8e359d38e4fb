//! Predictive probabilities of Gibbs-type priors with `α ∈ (0, 1)`.
//!
//! A Gibbs-type prior is specified by a [`GibbsModel`]: a stability index and
//! a tilting function `h`. After `n` observations with `k` distinct types,
//! the next observation is new with probability `V_{n+1,k+1} / V_{n,k}` and
//! repeats type `i` with probability `(n_i - α) V_{n+1,k} / V_{n,k}`. This
//! crate evaluates those weights
//!
//! * exactly, from closed forms (Poisson–Dirichlet, stable), an
//!   extended-precision series (normalized generalized Gamma) or
//!   two-dimensional quadrature (any tilt, small `n`);
//! * by Monte Carlo through the tilted-stable representation of `V_{n,k}`;
//! * by first- and second-order large-`n` approximations.
//!
//! ```
//! use gibbs_predictive::{approx, GibbsModel, PartitionState, predictive};
//!
//! let model = GibbsModel::poisson_dirichlet(0.5, 1.0)?;
//! let state = PartitionState::from_labels([1u64, 1, 2, 3, 1, 4, 2, 2, 5, 1]);
//! let settings = predictive::Settings::default();
//! let exact = predictive::predictive_weights(&model, &state, predictive::Backend::Exact, &settings)?;
//! assert!((exact.new_mass - 3.5 / 11.0).abs() < 1e-15);
//! let first = approx::first_order_weights(&model, state.n(), state.k())?;
//! assert_eq!(first.new_mass, 0.25);
//! # Ok::<(), gibbs_predictive::Error>(())
//! ```

pub mod approx;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod ngg_series;
pub mod predictive;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stable;
pub mod stats;

pub use approx::{PredictiveWeights, SecondOrderForm, WeightForm};
pub use error::{Error, Result};
pub use model::{pd_log_v, stable_log_v, GenericTilt, GibbsModel, LogValue, Tilt};
pub use montecarlo::{mc_log_v_ngg, mc_new_type_weight, quadrature_v, VEstimate};
pub use ngg_series::{ngg_log_v_series, ngg_predictive_weight_exact, DEFAULT_PRECISION_DIGITS};
pub use predictive::{Backend, Observation, PartitionState};
pub use rng::RngStream;
pub use special::incomplete_gamma;
pub use stable::{
    sample_exp_tilted_stable, sample_poly_tilted_stable, sample_positive_stable, sample_zeta, stable_pdf,
    RejectionCounter, StableIndex,
};
