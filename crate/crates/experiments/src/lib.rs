//! Comparison experiments for Gibbs-type predictive weights: exact versus
//! approximate Poisson–Dirichlet weights, Monte Carlo versus approximate
//! generalized Gamma weights, Monte Carlo timing, and a validation suite.
//!
//! Every command writes CSV tables (the source of truth) and, unless
//! disabled, SVG plots drawn from them. Given the same configuration and seed
//! the CSV files are byte-identical across runs; wall-clock measurements go
//! to separate `*.runtime.csv` files or to the timing tables.

pub mod config;
pub mod data;
pub mod ngg;
pub mod output;
pub mod pd;
pub mod timing;
pub mod validate;

pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum ExpError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("plot error: {0}")]
    Plot(String),
    #[error(transparent)]
    Numeric(#[from] gibbs_predictive::Error),
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/stable.md")]
    mod stable {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/ngg-series.md")]
    mod ngg_series {}
    #[doc = include_str!("../../../book/src/approximations.md")]
    mod approximations {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/predictive.md")]
    mod predictive {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
