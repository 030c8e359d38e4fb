//! Exact versus approximate Poisson–Dirichlet weights along a trajectory.

use std::path::PathBuf;

use gibbs_predictive::approx::{first_order_weights, second_order_weights};
use gibbs_predictive::predictive::{exact_weights, Settings};
use gibbs_predictive::{GibbsModel, SecondOrderForm};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::data::{configuration_ks, shared_labels};
use crate::output::{ensure_dir, num, plot_log_x, stem, Series, Table};
use crate::ExpError;

pub const HEADER: [&str; 8] =
    ["n", "k_n", "exact", "first", "second_expanded", "second_rational", "err_first", "err_second"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdRow {
    pub n: u64,
    pub k: u64,
    pub exact: f64,
    pub first: f64,
    pub second_expanded: f64,
    pub second_rational: f64,
}

impl PdRow {
    pub fn err_first(&self) -> f64 {
        self.exact - self.first
    }

    pub fn err_second(&self) -> f64 {
        self.exact - self.second_expanded
    }
}

/// New-type weights for `n = 1..=ks.len()`, where `ks[n-1] = k_n`.
pub fn pd_rows(alpha: f64, theta: f64, ks: &[u64]) -> Result<Vec<PdRow>, ExpError> {
    let model = GibbsModel::poisson_dirichlet(alpha, theta)?;
    let settings = Settings::default();
    ks.iter()
        .enumerate()
        .map(|(i, &k)| {
            let n = i as u64 + 1;
            Ok(PdRow {
                n,
                k,
                exact: exact_weights(&model, n, k, &settings)?.new_mass,
                first: first_order_weights(&model, n, k)?.new_mass,
                second_expanded: second_order_weights(&model, n, k, SecondOrderForm::Expanded)?.new_mass,
                second_rational: second_order_weights(&model, n, k, SecondOrderForm::Rational)?.new_mass,
            })
        })
        .collect()
}

pub fn pd_table(rows: &[PdRow]) -> Table {
    let mut t = Table::new(&HEADER);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            num(r.exact),
            num(r.first),
            num(r.second_expanded),
            num(r.second_rational),
            num(r.err_first()),
            num(r.err_second()),
        ]);
    }
    t
}

fn plot(rows: &[PdRow], cfg: &ExperimentConfig, path: &std::path::Path, title: &str) -> Result<(), ExpError> {
    let from = if cfg.n_max >= cfg.plot_from { cfg.plot_from } else { 1 };
    let pick = |f: fn(&PdRow) -> f64| rows.iter().filter(|r| r.n >= from).map(|r| (r.n as f64, f(r))).collect();
    let series = [
        Series { name: "exact".into(), points: pick(|r| r.exact) },
        Series { name: "first order".into(), points: pick(|r| r.first) },
        Series { name: "second order".into(), points: pick(|r| r.second_expanded) },
    ];
    plot_log_x(path, title, "new-type probability", &series)?;
    Ok(())
}

/// One CSV (and SVG) per `(α, θ)` of the grid; returns the CSV paths.
pub fn cmd_pd_compare(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, ExpError> {
    cfg.validate()?;
    ensure_dir(&cfg.out)?;
    let shared = shared_labels(cfg)?;
    let grid: Vec<(f64, f64)> = cfg.alphas.iter().flat_map(|&a| cfg.thetas.iter().map(move |&t| (a, t))).collect();
    grid.par_iter()
        .map(|&(alpha, theta)| {
            let model = GibbsModel::poisson_dirichlet(alpha, theta)?;
            let ks = configuration_ks(cfg, &model, shared.as_deref())?;
            let rows = pd_rows(alpha, theta, &ks)?;
            let name = stem("pd", alpha, theta);
            let csv = cfg.out.join(format!("{name}.csv"));
            pd_table(&rows).write(&csv)?;
            if cfg.plot {
                plot(&rows, cfg, &cfg.out.join(format!("{name}.svg")), &format!("PD  α = {alpha}, θ = {theta}"))?;
            }
            Ok(csv)
        })
        .collect()
}
