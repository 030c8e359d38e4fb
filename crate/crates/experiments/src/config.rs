//! Experiment configuration: a flat TOML file whose keys may be overridden on
//! the command line.

use std::fs;
use std::path::{Path, PathBuf};

use gibbs_predictive::montecarlo::DEFAULT_REPLICATES;
use gibbs_predictive::{GibbsModel, DEFAULT_PRECISION_DIGITS};
use serde::Deserialize;

use crate::ExpError;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// `--desk` caps for Monte Carlo heavy commands.
pub const DESK_N_MAX: u64 = 100;
pub const DESK_M: usize = 1_000;

/// `--quick` caps.
pub const QUICK_N_MAX: u64 = 50;
pub const QUICK_M: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Zeta,
    Urn,
    File,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alphas: Vec<f64>,
    /// Poisson–Dirichlet θ grid.
    pub thetas: Vec<f64>,
    /// Generalized Gamma τ grid.
    pub taus: Vec<f64>,
    pub data: DataKind,
    pub sigma: f64,
    /// One integer label per line; used when `data = "file"`.
    pub data_file: Option<PathBuf>,
    /// Draw a separate Zeta sample for every configuration.
    pub independent_data: bool,
    /// First sample size written to the NGG and timing tables.
    pub n_min: u64,
    pub n_max: u64,
    /// Left edge of the log-scaled x axis in plots.
    pub plot_from: u64,
    pub m: usize,
    pub precision: u32,
    /// Largest `n` at which the NGG series is evaluated.
    pub series_max_n: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub plot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.25, 0.5, 0.75],
            thetas: vec![1.0, 3.0, 10.0],
            taus: vec![1.0, 3.0, 10.0],
            data: DataKind::Zeta,
            sigma: 1.5,
            data_file: None,
            independent_data: false,
            n_min: 1,
            n_max: 500,
            plot_from: 50,
            m: DEFAULT_REPLICATES,
            precision: DEFAULT_PRECISION_DIGITS,
            series_max_n: 100,
            seed: DEFAULT_SEED,
            out: PathBuf::from("out"),
            plot: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExpError> {
        toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExpError> {
        let text = fs::read_to_string(path).map_err(|e| ExpError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply_desk(&mut self) {
        self.n_max = self.n_max.min(DESK_N_MAX);
        self.m = self.m.min(DESK_M);
    }

    pub fn apply_quick(&mut self) {
        self.n_max = self.n_max.min(QUICK_N_MAX);
        self.m = self.m.min(QUICK_M);
    }

    pub fn validate(&self) -> Result<(), ExpError> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        if self.alphas.is_empty() {
            return bad("alphas must not be empty".into());
        }
        for &a in &self.alphas {
            GibbsModel::stable(a).map_err(|e| ExpError::Config(e.to_string()))?;
            for &theta in &self.thetas {
                GibbsModel::poisson_dirichlet(a, theta).map_err(|e| ExpError::Config(e.to_string()))?;
            }
            for &tau in &self.taus {
                GibbsModel::generalized_gamma(a, tau).map_err(|e| ExpError::Config(e.to_string()))?;
            }
        }
        if self.n_max < 1 {
            return bad("n_max must be at least 1".into());
        }
        if self.n_min < 1 || self.n_min > self.n_max {
            return bad(format!("n_min must lie in [1, n_max], got {}", self.n_min));
        }
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if self.precision == 0 {
            return bad("precision must be positive".into());
        }
        if !(self.sigma > 1.0) {
            return bad(format!("sigma must exceed 1, got {}", self.sigma));
        }
        if self.data == DataKind::File && self.data_file.is_none() {
            return bad("data = \"file\" needs data_file".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let c = ExperimentConfig::default();
        assert_eq!(c.alphas, vec![0.25, 0.5, 0.75]);
        assert_eq!((c.n_max, c.m, c.precision), (500, 10_000, 50));
        c.validate().unwrap();
    }

    #[test]
    fn parses_flat_file() {
        let c = ExperimentConfig::from_toml("alphas = [0.5]\nthetas = [2.0]\nn_max = 40\nseed = 7\n").unwrap();
        assert_eq!((c.alphas.as_slice(), c.n_max, c.seed), (&[0.5][..], 40, 7));
        assert_eq!(c.taus, vec![1.0, 3.0, 10.0]);
        assert!(ExperimentConfig::from_toml("nmax = 3").is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        let mut c = ExperimentConfig { thetas: vec![-0.3], alphas: vec![0.25], ..Default::default() };
        assert!(c.validate().is_err());
        c.thetas = vec![1.0];
        c.m = 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn desk_caps() {
        let mut c = ExperimentConfig::default();
        c.apply_desk();
        assert_eq!((c.n_max, c.m), (100, 1000));
    }
}
