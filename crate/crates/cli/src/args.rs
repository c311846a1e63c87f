use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rmom_core::experiment::ExperimentConfig;
use rmom_core::instance::ProblemKind;
use rmom_core::optim::{BetaRule, OptimizerKind};

#[derive(Parser, Debug)]
#[command(name = "rmom", version, about = "Riemannian accelerated gradient descent experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance and write it as JSON.
    Gen(Flags),
    /// Run one optimizer and write its trace, restart sidecar and manifest.
    Run(Flags),
    /// Run several optimizers on one instance and write a long-format CSV.
    Compare {
        /// Comma-separated optimizers; defaults to the configured one.
        #[arg(long, value_delimiter = ',')]
        optimizers: Vec<OptimizerKind>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run with full-point recording and write the certificate.
    Certify(Flags),
}

/// Flags override keys from `--config`, which override the defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// TOML configuration, or a run manifest to reproduce.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<ProblemKind>,
    #[arg(long)]
    pub optimizer: Option<OptimizerKind>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub cond: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long = "gs-iters")]
    pub gs_iters: Option<usize>,
    #[arg(long = "beta-rule")]
    pub beta_rule: Option<BetaRule>,
    #[arg(long = "L")]
    pub lipschitz: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "D")]
    pub diameter: Option<f64>,
    /// Rayleigh: use A + shift·I.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    /// Suboptimality (ds distance for scaling) for iterations-to-threshold
    /// and the restart target.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long = "grad-tol")]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub certify: bool,
    /// Write zeros in the wall_ns column so traces are byte-reproducible.
    #[arg(long = "no-wall-clock")]
    pub no_wall_clock: bool,
    /// Instance JSON produced by `gen`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Flags {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f.clone() { cfg.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if self.$f.is_some() { cfg.$f = self.$f.clone(); } )* };
        }
        set!(problem, optimizer, seed, iters, gs_iters, alpha, c, grad_tol);
        set_opt!(d, n, m, cond, beta_rule, lipschitz, mu, diameter, shift, threshold);
        if self.certify {
            cfg.certify = true;
        }
        if self.no_wall_clock {
            cfg.wall_clock = false;
        }
        if let Some(p) = &self.instance {
            cfg.instance = Some(p.display().to_string());
        }
        if let Some(p) = &self.out {
            cfg.out = Some(p.display().to_string());
        }
    }
}
