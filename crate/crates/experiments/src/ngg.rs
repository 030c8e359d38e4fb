//! Monte Carlo versus approximate generalized Gamma weights along a
//! trajectory, with the extended-precision series where it is affordable.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gibbs_predictive::approx::{first_order_weights, second_order_weights};
use gibbs_predictive::montecarlo::{mc_weight, Execution, McWeight};
use gibbs_predictive::ngg_series::ngg_predictive_weight_exact;
use gibbs_predictive::{Error, GibbsModel, RngStream, SecondOrderForm};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::data::{configuration_ks, shared_labels};
use crate::output::{ensure_dir, num, opt_num, plot_log_x, stem, Series, Table};
use crate::ExpError;

pub const HEADER: [&str; 9] =
    ["n", "k_n", "mc_estimate", "mc_se", "range_flag", "first", "second_expanded", "exact_series", "series_status"];

/// Outcome of the series evaluation at one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesCell {
    Value(f64),
    /// `n` above the series guard.
    Skipped,
    PrecisionInsufficient,
    OutOfRange(f64),
}

impl SeriesCell {
    pub fn value(&self) -> Option<f64> {
        match self {
            SeriesCell::Value(v) => Some(*v),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            SeriesCell::Value(_) => "ok",
            SeriesCell::Skipped => "skipped",
            SeriesCell::PrecisionInsufficient => "precision_insufficient",
            SeriesCell::OutOfRange(_) => "out_of_range",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NggRow {
    pub n: u64,
    pub k: u64,
    pub mc: McWeight,
    pub first: f64,
    pub second_expanded: f64,
    pub series: SeriesCell,
    pub runtime_s: f64,
}

/// Monte Carlo stream of one configuration; step `n` uses its sub-stream `n`.
pub fn mc_stream(seed: u64, model: &GibbsModel) -> RngStream {
    RngStream::new(seed).labelled(&format!("mc/{}", model.label()))
}

pub fn series_cell(n: u64, k: u64, alpha: f64, tau: f64, digits: u32, max_n: u64) -> Result<SeriesCell, ExpError> {
    if n > max_n {
        return Ok(SeriesCell::Skipped);
    }
    match ngg_predictive_weight_exact(n, k, alpha, tau, digits) {
        Ok(v) => Ok(SeriesCell::Value(v)),
        Err(Error::PrecisionInsufficient { .. }) => Ok(SeriesCell::PrecisionInsufficient),
        Err(Error::OutOfRange { value }) => Ok(SeriesCell::OutOfRange(value)),
        Err(e) => Err(e.into()),
    }
}

/// Rows for `n = n_min..=n_max`, where `ks[n-1] = k_n`.
pub fn ngg_rows(alpha: f64, tau: f64, ks: &[u64], cfg: &ExperimentConfig) -> Result<Vec<NggRow>, ExpError> {
    let model = GibbsModel::generalized_gamma(alpha, tau)?;
    let stream = mc_stream(cfg.seed, &model);
    let last = cfg.n_max.min(ks.len() as u64);
    (cfg.n_min..=last)
        .map(|n| {
            let k = ks[n as usize - 1];
            let start = Instant::now();
            let mc = mc_weight(&model, n, k, cfg.m, stream.substream(n), Execution::Sequential)?;
            let runtime_s = start.elapsed().as_secs_f64();
            Ok(NggRow {
                n,
                k,
                mc,
                first: first_order_weights(&model, n, k)?.new_mass,
                second_expanded: second_order_weights(&model, n, k, SecondOrderForm::Expanded)?.new_mass,
                series: series_cell(n, k, alpha, tau, cfg.precision, cfg.series_max_n)?,
                runtime_s,
            })
        })
        .collect()
}

pub fn ngg_table(rows: &[NggRow]) -> Table {
    let mut t = Table::new(&HEADER);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            num(r.mc.estimate),
            num(r.mc.std_error),
            u8::from(!r.mc.in_range).to_string(),
            num(r.first),
            num(r.second_expanded),
            opt_num(r.series.value()),
            r.series.status().to_string(),
        ]);
    }
    t
}

pub fn runtime_table(rows: &[NggRow]) -> Table {
    let mut t = Table::new(&["n", "runtime_s"]);
    for r in rows {
        t.push(vec![r.n.to_string(), num(r.runtime_s)]);
    }
    t
}

fn plot(rows: &[NggRow], cfg: &ExperimentConfig, path: &Path, title: &str) -> Result<(), ExpError> {
    let from = if cfg.n_max >= cfg.plot_from { cfg.plot_from } else { cfg.n_min };
    let sel = || rows.iter().filter(|r| r.n >= from);
    let mut series = vec![
        Series { name: "Monte Carlo".into(), points: sel().map(|r| (r.n as f64, r.mc.estimate)).collect() },
        Series { name: "first order".into(), points: sel().map(|r| (r.n as f64, r.first)).collect() },
        Series { name: "second order".into(), points: sel().map(|r| (r.n as f64, r.second_expanded)).collect() },
    ];
    let exact: Vec<(f64, f64)> = sel().filter_map(|r| r.series.value().map(|v| (r.n as f64, v))).collect();
    if !exact.is_empty() {
        series.push(Series { name: "series".into(), points: exact });
    }
    plot_log_x(path, title, "new-type probability", &series)?;
    Ok(())
}

/// One CSV (plus a `.runtime.csv` sidecar and an SVG) per `(α, τ)`.
pub fn cmd_ngg_compare(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, ExpError> {
    cfg.validate()?;
    ensure_dir(&cfg.out)?;
    let shared = shared_labels(cfg)?;
    let grid: Vec<(f64, f64)> = cfg.alphas.iter().flat_map(|&a| cfg.taus.iter().map(move |&t| (a, t))).collect();
    grid.par_iter()
        .map(|&(alpha, tau)| {
            let model = GibbsModel::generalized_gamma(alpha, tau)?;
            let ks = configuration_ks(cfg, &model, shared.as_deref())?;
            let rows = ngg_rows(alpha, tau, &ks, cfg)?;
            let name = stem("ngg", alpha, tau);
            let csv = cfg.out.join(format!("{name}.csv"));
            ngg_table(&rows).write(&csv)?;
            runtime_table(&rows).write(&cfg.out.join(format!("{name}.runtime.csv")))?;
            if cfg.plot {
                plot(&rows, cfg, &cfg.out.join(format!("{name}.svg")), &format!("NGG  α = {alpha}, τ = {tau}"))?;
            }
            Ok(csv)
        })
        .collect()
}
