//! Wall-clock cost of Monte Carlo weights along a trajectory, against the
//! closed-form approximations.

use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use gibbs_predictive::approx::{first_order_weights, second_order_weights};
use gibbs_predictive::montecarlo::{mc_weight, Execution};
use gibbs_predictive::{GibbsModel, SecondOrderForm};

use crate::config::ExperimentConfig;
use crate::data::{configuration_ks, shared_labels};
use crate::ngg::mc_stream;
use crate::output::{ensure_dir, num, plot_log_x, stem, Series, Table};
use crate::ExpError;

pub const HEADER: [&str; 6] = ["n", "k_n", "mc_seconds", "cumulative_seconds", "rejection_count", "approx_seconds"];

/// Approximation evaluations averaged per timing sample.
pub const APPROX_REPEATS: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRow {
    pub n: u64,
    pub k: u64,
    pub mc_seconds: f64,
    pub cumulative_seconds: f64,
    pub rejection_count: u64,
    /// Mean time of one first-order plus one expanded second-order weight.
    pub approx_seconds: f64,
}

/// Time one Monte Carlo weight per `n = n_min..=n_max` on the calling thread.
pub fn timing_rows(alpha: f64, tau: f64, ks: &[u64], cfg: &ExperimentConfig) -> Result<Vec<TimingRow>, ExpError> {
    let model = GibbsModel::generalized_gamma(alpha, tau)?;
    let stream = mc_stream(cfg.seed, &model);
    let last = cfg.n_max.min(ks.len() as u64);
    let mut cumulative = 0.0;
    let mut rows = Vec::new();
    for n in cfg.n_min..=last {
        let k = ks[n as usize - 1];
        let start = Instant::now();
        let w = mc_weight(&model, n, k, cfg.m, stream.substream(n), Execution::Sequential)?;
        let mc_seconds = start.elapsed().as_secs_f64();
        black_box(w);
        let start = Instant::now();
        for _ in 0..APPROX_REPEATS {
            let m = black_box(&model);
            black_box(first_order_weights(m, black_box(n), k)?);
            black_box(second_order_weights(m, black_box(n), k, SecondOrderForm::Expanded)?);
        }
        let approx_seconds = start.elapsed().as_secs_f64() / f64::from(APPROX_REPEATS);
        cumulative += mc_seconds;
        rows.push(TimingRow {
            n,
            k,
            mc_seconds,
            cumulative_seconds: cumulative,
            rejection_count: w.rejection_count,
            approx_seconds,
        });
    }
    Ok(rows)
}

pub fn timing_table(rows: &[TimingRow]) -> Table {
    let mut t = Table::new(&HEADER);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            num(r.mc_seconds),
            num(r.cumulative_seconds),
            r.rejection_count.to_string(),
            num(r.approx_seconds),
        ]);
    }
    t
}

/// Per-configuration timing tables plus `timing_mean.csv`, the average over
/// the grid. Configurations run one after another so measurements do not
/// compete for cores.
pub fn cmd_timing(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, ExpError> {
    cfg.validate()?;
    ensure_dir(&cfg.out)?;
    let shared = shared_labels(cfg)?;
    let mut paths = Vec::new();
    let mut all: Vec<Vec<TimingRow>> = Vec::new();
    for &alpha in &cfg.alphas {
        for &tau in &cfg.taus {
            let model = GibbsModel::generalized_gamma(alpha, tau)?;
            let ks = configuration_ks(cfg, &model, shared.as_deref())?;
            let rows = timing_rows(alpha, tau, &ks, cfg)?;
            let name = stem("timing", alpha, tau);
            let csv = cfg.out.join(format!("{name}.csv"));
            timing_table(&rows).write(&csv)?;
            if cfg.plot {
                let series = [Series {
                    name: "Monte Carlo".into(),
                    points: rows.iter().map(|r| (r.n as f64, r.cumulative_seconds)).collect(),
                }];
                plot_log_x(
                    &cfg.out.join(format!("{name}.svg")),
                    &format!("NGG  α = {alpha}, τ = {tau}"),
                    "cumulative seconds",
                    &series,
                )?;
            }
            paths.push(csv);
            all.push(rows);
        }
    }
    let mut mean = Table::new(&["n", "mean_mc_seconds", "mean_cumulative_seconds", "mean_rejection_count"]);
    let len = all.iter().map(Vec::len).min().unwrap_or(0);
    let c = all.len() as f64;
    let mut mean_points = Vec::with_capacity(len);
    for i in 0..len {
        let per: f64 = all.iter().map(|r| r[i].mc_seconds).sum::<f64>() / c;
        let cum: f64 = all.iter().map(|r| r[i].cumulative_seconds).sum::<f64>() / c;
        let rej: f64 = all.iter().map(|r| r[i].rejection_count as f64).sum::<f64>() / c;
        mean.push(vec![all[0][i].n.to_string(), num(per), num(cum), num(rej)]);
        mean_points.push((all[0][i].n as f64, cum));
    }
    let csv = cfg.out.join("timing_mean.csv");
    mean.write(&csv)?;
    if cfg.plot && !mean_points.is_empty() {
        let series = [Series { name: "grid average".into(), points: mean_points }];
        plot_log_x(&cfg.out.join("timing_mean.svg"), "Monte Carlo cost, grid average", "cumulative seconds", &series)?;
    }
    paths.push(csv);
    Ok(paths)
}
