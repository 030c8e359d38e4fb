//! The observation streams behind each configuration, reduced to `k_n`.

use std::fs;
use std::path::Path;

use gibbs_predictive::predictive::{run_trajectory, zeta_labels, Backend, DataSource, Settings};
use gibbs_predictive::{GibbsModel, PartitionState, RngStream, Tilt};

use crate::config::{DataKind, ExperimentConfig};
use crate::ExpError;

/// `k_n` after each of the first `labels.len()` observations.
pub fn k_sequence(labels: &[u64]) -> Vec<u64> {
    let mut state = PartitionState::<u64>::new();
    labels
        .iter()
        .map(|&l| {
            state.push(l);
            state.k()
        })
        .collect()
}

pub fn read_labels(path: &Path) -> Result<Vec<u64>, ExpError> {
    let text = fs::read_to_string(path).map_err(|e| ExpError::Io(format!("{}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse().map_err(|_| ExpError::Config(format!("{}: line {}: not an integer label", path.display(), i + 1)))
        })
        .collect()
}

/// Labels shared by every configuration of a run, when the data source
/// allows sharing.
pub fn shared_labels(cfg: &ExperimentConfig) -> Result<Option<Vec<u64>>, ExpError> {
    match cfg.data {
        DataKind::Zeta if !cfg.independent_data => {
            Ok(Some(zeta_labels(cfg.sigma, cfg.n_max as usize, RngStream::new(cfg.seed).labelled("data"))?))
        }
        DataKind::File => {
            let path = cfg.data_file.as_ref().ok_or_else(|| ExpError::Config("missing data_file".into()))?;
            let labels = read_labels(path)?;
            if (labels.len() as u64) < cfg.n_max {
                return Err(ExpError::Config(format!(
                    "{} holds {} labels, n_max = {}",
                    path.display(),
                    labels.len(),
                    cfg.n_max
                )));
            }
            Ok(Some(labels[..cfg.n_max as usize].to_vec()))
        }
        _ => Ok(None),
    }
}

/// `k_n`, `n = 1..=n_max`, for one configuration. Urn data follow the exact
/// rule for Poisson–Dirichlet priors and the rational second-order rule
/// otherwise.
pub fn configuration_ks(
    cfg: &ExperimentConfig,
    model: &GibbsModel,
    shared: Option<&[u64]>,
) -> Result<Vec<u64>, ExpError> {
    if let Some(labels) = shared {
        return Ok(k_sequence(labels));
    }
    let name = model.label();
    match cfg.data {
        DataKind::Urn => {
            let backend = match model.tilt() {
                Tilt::PoissonDirichlet { .. } | Tilt::Stable => Backend::Exact,
                _ => Backend::SecondRational,
            };
            let stream = RngStream::new(cfg.seed).labelled(&format!("urn/{name}"));
            let rows = run_trajectory(model, &DataSource::Urn, cfg.n_max, &[backend], &Settings::default(), stream)?;
            Ok(rows.iter().map(|r| r.k).collect())
        }
        _ => {
            let stream = RngStream::new(cfg.seed).labelled(&format!("data/{name}"));
            Ok(k_sequence(&zeta_labels(cfg.sigma, cfg.n_max as usize, stream)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_from_labels() {
        assert_eq!(k_sequence(&[4, 4, 1, 9, 1]), vec![1, 1, 2, 3, 3]);
    }

    #[test]
    fn shared_versus_independent() {
        let cfg = ExperimentConfig { n_max: 200, ..Default::default() };
        let shared = shared_labels(&cfg).unwrap().unwrap();
        let a = GibbsModel::poisson_dirichlet(0.25, 1.0).unwrap();
        let b = GibbsModel::poisson_dirichlet(0.75, 10.0).unwrap();
        assert_eq!(
            configuration_ks(&cfg, &a, Some(&shared)).unwrap(),
            configuration_ks(&cfg, &b, Some(&shared)).unwrap()
        );
        let ind = ExperimentConfig { independent_data: true, ..cfg };
        assert!(shared_labels(&ind).unwrap().is_none());
        let ka = configuration_ks(&ind, &a, None).unwrap();
        let kb = configuration_ks(&ind, &b, None).unwrap();
        assert_ne!(ka, kb);
    }

    #[test]
    fn urn_ks_are_monotone() {
        let cfg = ExperimentConfig { n_max: 300, data: DataKind::Urn, ..Default::default() };
        let m = GibbsModel::poisson_dirichlet(0.5, 1.0).unwrap();
        let ks = configuration_ks(&cfg, &m, None).unwrap();
        assert_eq!(ks[0], 1);
        assert!(ks.windows(2).all(|w| w[1] - w[0] <= 1 && w[1] >= w[0]));
    }
}
