use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gibbs_experiments::validate::{run_validation, ValidateOptions};
use gibbs_experiments::{ngg, pd, timing, ExpError, ExperimentConfig};
use gibbs_predictive::stable_pdf;

#[derive(Parser)]
#[command(name = "gibbs-experiments", version, about = "Predictive weight experiments for Gibbs-type priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact versus approximate Poisson–Dirichlet weights.
    PdCompare(Common),
    /// Monte Carlo versus approximate generalized Gamma weights.
    NggCompare(Common),
    /// Monte Carlo cost along the trajectory.
    Timing(Common),
    /// Sampler, density and cross-method checks.
    Validate(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo replicates.
    #[arg(long)]
    m: Option<usize>,
    /// Largest sample size.
    #[arg(long)]
    nmax: Option<u64>,
    /// Decimal digits for the extended-precision series.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_plot: bool,
    /// Small run: n ≤ 50, M ≤ 500; a reduced validation suite.
    #[arg(long)]
    quick: bool,
    /// Caps for a desk machine: n ≤ 100, M ≤ 1000.
    #[arg(long)]
    desk: bool,
    /// Draw a separate Zeta sample for every configuration.
    #[arg(long)]
    independent_data: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, ExpError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(n) = self.nmax {
            cfg.n_max = n;
        }
        if let Some(p) = self.precision {
            cfg.precision = p;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if self.no_plot {
            cfg.plot = false;
        }
        if self.independent_data {
            cfg.independent_data = true;
        }
        if self.desk {
            cfg.apply_desk();
        }
        if self.quick {
            cfg.apply_quick();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(paths: Result<Vec<PathBuf>, ExpError>) -> ExitCode {
    match paths {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                ExpError::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&ExperimentConfig) -> Result<Vec<PathBuf>, ExpError>) = match &cli.command {
        Command::PdCompare(c) => (c, pd::cmd_pd_compare),
        Command::NggCompare(c) => (c, ngg::cmd_ngg_compare),
        Command::Timing(c) => (c, timing::cmd_timing),
        Command::Validate(c) => {
            let cfg = match c.config() {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let checks = run_validation(ValidateOptions { quick: c.quick, seed: cfg.seed }, &stable_pdf);
            for check in &checks {
                println!("{check}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed", checks.len());
            return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    let cfg = match common.config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    report(run(&cfg))
}
