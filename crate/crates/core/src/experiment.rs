//! Experiment plumbing: a flat configuration with per-problem defaults, its
//! resolution into an instance plus optimizer settings, and single runs and
//! comparisons that report suboptimality against an independent witness.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::certify::{self, Certificate, CertifyOptions, OptimumWitness, SegmentCheck};
use crate::curvature::CurvatureConstants;
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceSpec, ProblemKind};
use crate::manifold::Point;
use crate::optim::{
    run_gurvits, run_ragd, run_ragdsdr, run_restarted, run_rgd, BetaRule, IterRecord, OptConfig,
    OptimizerKind, RestartConfig, Trace,
};
use crate::search::SearchConfig;

/// Presolve tolerance for SPD witnesses.
pub const PRESOLVE_TOL: f64 = 1e-13;
/// Presolve budget as a multiple of the run's `iters`.
pub const PRESOLVE_FACTOR: usize = 10;
/// Dimension from which a run is flagged as paper scale.
pub const PAPER_SCALE_D: usize = 2000;

/// Every key may be omitted; [`Experiment::prepare`] fills in per-problem defaults.
/// Keys match the CLI flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub optimizer: OptimizerKind,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub cond: Option<f64>,
    pub seed: u64,
    pub iters: usize,
    pub gs_iters: usize,
    pub beta_rule: Option<BetaRule>,
    #[serde(rename = "L")]
    pub lipschitz: Option<f64>,
    pub mu: Option<f64>,
    pub alpha: f64,
    pub c: f64,
    #[serde(rename = "D")]
    pub diameter: Option<f64>,
    /// Rayleigh only: optimise with `A + shift·I`.
    pub shift: Option<f64>,
    /// Suboptimality (ds distance for scaling) used for iterations-to-
    /// threshold and as the restart stopping target.
    pub threshold: Option<f64>,
    pub grad_tol: f64,
    pub certify: bool,
    /// Record per-iteration wall time; when off the column is zero and
    /// traces are byte-reproducible.
    pub wall_clock: bool,
    pub out: Option<String>,
    /// Load the instance from a file instead of generating it.
    pub instance: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Rayleigh,
            optimizer: OptimizerKind::Ragdsdr,
            d: None,
            n: None,
            m: None,
            cond: None,
            seed: 0,
            iters: 300,
            gs_iters: 10,
            beta_rule: None,
            lipschitz: None,
            mu: None,
            alpha: 1.0,
            c: 2.0,
            diameter: None,
            shift: None,
            threshold: None,
            grad_tol: 1e-10,
            certify: false,
            wall_clock: true,
            out: None,
            instance: None,
        }
    }
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, optimizer: OptimizerKind) -> Self {
        Self {
            problem,
            optimizer,
            ..Self::default()
        }
    }

    /// Generator parameters with defaults applied.
    pub fn instance_spec(&self) -> InstanceSpec {
        let mut s = InstanceSpec::defaults(self.problem, self.seed);
        if let Some(d) = self.d {
            s.d = d;
        }
        match self.problem {
            ProblemKind::Rayleigh => s.n = self.n.or(s.n),
            ProblemKind::Karcher => {
                s.m = self.m.or(s.m);
                s.cond = self.cond.or(s.cond);
            }
            ProblemKind::Scaling => s.m = self.m.or(s.m),
        }
        s
    }

    pub fn default_diameter(problem: ProblemKind) -> f64 {
        match problem {
            ProblemKind::Rayleigh => FRAC_PI_2,
            ProblemKind::Karcher | ProblemKind::Scaling => 1.0,
        }
    }

    pub fn default_threshold(problem: ProblemKind) -> f64 {
        match problem {
            ProblemKind::Rayleigh => 1e-6,
            ProblemKind::Karcher => 1e-8,
            ProblemKind::Scaling => 1e-4,
        }
    }

    fn check_combination(&self) -> Result<()> {
        let not_for = |what: &str| Err(Error::Invalid(what.to_string()));
        match (self.optimizer, self.problem) {
            (OptimizerKind::Ragd, ProblemKind::Scaling) => {
                return not_for(
                    "RAGD is not applicable to operator scaling: the log-capacity is not strongly \
                     geodesically convex, so no mu is available",
                )
            }
            (OptimizerKind::Gurvits, p) if p != ProblemKind::Scaling => {
                return not_for("gurvits requires the scaling problem")
            }
            _ => {}
        }
        if self.shift.is_some() && self.problem != ProblemKind::Rayleigh {
            return not_for("shift applies to the rayleigh problem only");
        }
        if self.certify
            && !matches!(
                self.optimizer,
                OptimizerKind::Ragdsdr | OptimizerKind::LinearCoupling | OptimizerKind::RagdsdrRestart
            )
        {
            return not_for("certification applies to ragdsdr, linear-coupling and ragdsdr-restart runs");
        }
        match (self.optimizer, self.beta_rule) {
            (OptimizerKind::LinearCoupling, Some(BetaRule::Search)) => {
                not_for("linear-coupling uses the nesterov beta rule")
            }
            (OptimizerKind::Rgd | OptimizerKind::Ragd | OptimizerKind::Gurvits, Some(_)) => {
                not_for("beta-rule applies to the ragdsdr family only")
            }
            _ => Ok(()),
        }
    }
}

pub fn is_paper_scale(spec: &InstanceSpec) -> bool {
    spec.d >= PAPER_SCALE_D
}

/// A configuration resolved against its instance.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub spec: InstanceSpec,
    pub instance: Instance,
    pub opt: OptConfig,
    pub mu: Option<f64>,
    pub threshold: f64,
}

/// Record of a finished run.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub optimizer: OptimizerKind,
    pub final_f: f64,
    pub final_grad_norm: Option<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub f_star: Option<f64>,
    pub final_suboptimality: Option<f64>,
    pub iterations_to_threshold: Option<usize>,
    pub threshold: f64,
    pub max_dist_x0: f64,
    /// `d(x_0, x*)`; compare with the configured `D`.
    pub dist_x0_xstar: Option<f64>,
    pub wall_ns: u64,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    /// `None` for Gurvits, which does not iterate on a manifold point.
    pub trace: Option<Trace>,
    pub records: Vec<IterRecord>,
    pub restarts: Vec<usize>,
    /// `(k, suboptimality or ds distance, wall_ns)` for `k = 0..=len`.
    pub metric: Vec<(usize, f64, u64)>,
    pub witness: Option<OptimumWitness>,
    pub certificate: Option<Certificate>,
    pub segments: Option<Vec<SegmentCheck>>,
    pub summary: RunSummary,
}

impl RunOutput {
    /// Certification outcome, `None` when not requested.
    pub fn certified(&self) -> Option<bool> {
        match (&self.certificate, &self.segments) {
            (Some(c), _) => Some(c.passed()),
            (None, Some(s)) => Some(s.iter().all(|s| s.contraction_ok && s.within_bound)),
            (None, None) => None,
        }
    }
}

impl Experiment {
    /// Validates the configuration and builds the instance. `loaded`
    /// replaces generation; its spec must describe the configured problem.
    pub fn prepare(config: &ExperimentConfig, loaded: Option<(InstanceSpec, Instance)>) -> Result<Self> {
        config.check_combination()?;
        if config.iters == 0 {
            return Err(Error::Invalid("iters must be >= 1".into()));
        }
        let (spec, mut instance) = match loaded {
            Some((spec, inst)) => {
                if spec.kind != config.problem {
                    return Err(Error::Invalid(format!(
                        "instance file holds a {} instance, config asks for {}",
                        spec.kind, config.problem
                    )));
                }
                (spec, inst)
            }
            None => {
                let spec = config.instance_spec();
                spec.validate()?;
                let inst = Instance::generate(&spec)?;
                (spec, inst)
            }
        };
        if let (Some(g), Instance::Rayleigh(p)) = (config.shift, &instance) {
            if !g.is_finite() {
                return Err(Error::Invalid("shift must be finite".into()));
            }
            instance = Instance::Rayleigh(p.shifted(g)?);
        }
        let problem = instance.problem();
        let lipschitz = match config.lipschitz {
            Some(l) => l,
            None => match &instance {
                Instance::Rayleigh(p) => p.lipschitz,
                Instance::Karcher(_) => 5.0,
                Instance::Scaling(_) => 1.0,
            },
        };
        let diameter = config.diameter.unwrap_or(ExperimentConfig::default_diameter(config.problem));
        if !(diameter > 0.0) || !diameter.is_finite() {
            return Err(Error::Invalid(format!("D must be positive, got {diameter}")));
        }
        let curvature = CurvatureConstants::from_bounds(&problem.manifold().curvature_bounds(diameter))?;
        let mut opt = OptConfig::new(lipschitz, curvature, diameter);
        opt.beta_rule = match config.optimizer {
            OptimizerKind::LinearCoupling => BetaRule::Nesterov,
            _ => config.beta_rule.unwrap_or(BetaRule::Search),
        };
        opt.search = SearchConfig::with_iters(config.gs_iters);
        opt.max_iters = config.iters;
        opt.grad_tol = config.grad_tol;
        opt.keep_points = config.certify || config.problem == ProblemKind::Scaling;
        opt.validate()?;

        let mu = match config.optimizer {
            OptimizerKind::Ragd => {
                let mu = config.mu.or_else(|| match &instance {
                    Instance::Karcher(_) => Some(1.0),
                    other => other.problem().mu_hint(),
                });
                match mu {
                    Some(m) if m > 0.0 && m.is_finite() => Some(m),
                    Some(m) => return Err(Error::Invalid(format!("ragd requires mu > 0, got {m}"))),
                    None => return Err(Error::Invalid("ragd requires mu".into())),
                }
            }
            _ => config.mu,
        };
        let threshold = config
            .threshold
            .unwrap_or(ExperimentConfig::default_threshold(config.problem));
        if !(threshold >= 0.0) {
            return Err(Error::Invalid("threshold must be non-negative".into()));
        }
        if config.optimizer == OptimizerKind::RagdsdrRestart {
            restart_config(config, 0.0, threshold).validate()?;
        }
        Ok(Self {
            config: config.clone(),
            spec,
            instance,
            opt,
            mu,
            threshold,
        })
    }

    pub fn start(&self) -> Point {
        self.instance.start(self.config.seed)
    }

    pub fn is_paper_scale(&self) -> bool {
        is_paper_scale(&self.spec)
    }

    /// Eigendecomposition for Rayleigh; a long RGD presolve from the start
    /// point otherwise.
    pub fn witness(&self) -> Result<OptimumWitness> {
        let x0 = self.start();
        match &self.instance {
            Instance::Rayleigh(p) => OptimumWitness::rayleigh(p, Some(&x0)),
            other => OptimumWitness::presolve(
                other.problem(),
                &x0,
                &self.opt,
                PRESOLVE_FACTOR * self.config.iters,
                PRESOLVE_TOL,
            ),
        }
    }

    /// Runs the configured optimizer, certifying when requested. Every
    /// optimizer except Gurvits gets a witness so that suboptimality can be
    /// reported.
    pub fn run(&self) -> Result<RunOutput> {
        let witness = if self.config.optimizer != OptimizerKind::Gurvits {
            Some(self.witness()?)
        } else {
            None
        };
        self.run_with(witness)
    }

    /// As [`Experiment::run`] with a precomputed witness.
    pub fn run_with(&self, witness: Option<OptimumWitness>) -> Result<RunOutput> {
        let problem = self.instance.problem();
        let x0 = self.start();
        let kind = self.config.optimizer;
        let f_star = witness.as_ref().map(|w| w.f_star);

        if kind == OptimizerKind::Gurvits {
            let Instance::Scaling(cap) = &self.instance else {
                unreachable!("combination checked in prepare")
            };
            let res = run_gurvits(cap, self.config.iters, self.config.grad_tol)?;
            let mut records: Vec<IterRecord> = res
                .windows(2)
                .enumerate()
                .map(|(k, w)| IterRecord {
                    k,
                    f_x: w[1].0,
                    f_y: w[0].0,
                    grad_norm_y: 0.0,
                    beta: 0.0,
                    a_next: 0.0,
                    big_a: 0.0,
                    cond2_margin: 0.0,
                    dist_x0: 0.0,
                    wall_ns: w[1].1,
                })
                .collect();
            if !self.config.wall_clock {
                records.iter_mut().for_each(|r| r.wall_ns = 0);
            }
            let metric: Vec<_> = std::iter::once((0, res[0].0, 0))
                .chain(records.iter().map(|r| (r.k + 1, r.f_x, r.wall_ns)))
                .collect();
            let last = metric.last().expect("initial residual").1;
            let summary = RunSummary {
                optimizer: kind,
                final_f: last,
                final_grad_norm: None,
                iterations: records.len(),
                restarts: 0,
                f_star: None,
                final_suboptimality: Some(last),
                iterations_to_threshold: metric.iter().position(|m| m.1 <= self.threshold),
                threshold: self.threshold,
                max_dist_x0: 0.0,
                dist_x0_xstar: None,
                wall_ns: records.last().map_or(0, |r| r.wall_ns),
            };
            return Ok(RunOutput {
                trace: None,
                records,
                restarts: Vec::new(),
                metric,
                witness: None,
                certificate: None,
                segments: None,
                summary,
            });
        }

        let mut trace = match kind {
            OptimizerKind::Rgd => run_rgd(problem, &x0, &self.opt)?,
            OptimizerKind::Ragdsdr | OptimizerKind::LinearCoupling => run_ragdsdr(problem, &x0, &self.opt)?,
            OptimizerKind::Ragd => run_ragd(problem, &x0, &self.opt, self.mu.expect("checked in prepare"))?,
            OptimizerKind::RagdsdrRestart => {
                let fs = f_star.ok_or_else(|| Error::Invalid("restarted runs need a witness".into()))?;
                run_restarted(problem, &x0, &self.opt, &restart_config(&self.config, fs, self.threshold))?
            }
            OptimizerKind::Gurvits => unreachable!(),
        };
        let wall_ns = trace.records.last().map_or(0, |r| r.wall_ns);
        if !self.config.wall_clock {
            trace.records.iter_mut().for_each(|r| r.wall_ns = 0);
        }

        let metric = match &self.instance {
            Instance::Scaling(cap) => {
                let xs = trace.iterates();
                let mut out = Vec::with_capacity(xs.len());
                for (k, x) in xs.iter().enumerate() {
                    let ns = if k == 0 { 0 } else { trace.records[k - 1].wall_ns };
                    out.push((k, cap.ds_distance_at(x).map_err(|e| e.at(k))?, ns));
                }
                out
            }
            _ => {
                let fs = f_star.unwrap_or(f64::NAN);
                trace
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(k, f)| (k, f - fs, if k == 0 { 0 } else { trace.records[k - 1].wall_ns }))
                    .collect()
            }
        };

        let (certificate, segments) = if self.config.certify {
            let w = witness.as_ref().expect("witness computed for certified runs");
            if kind == OptimizerKind::RagdsdrRestart {
                let rc = restart_config(&self.config, w.f_star, self.threshold);
                (None, Some(certify::check_restart_segments(&trace, &self.opt, &rc)?))
            } else {
                let opts = CertifyOptions {
                    seed: self.config.seed,
                    ..CertifyOptions::default()
                };
                (Some(certify::certify(&trace, &self.opt, w, &opts)?), None)
            }
        } else {
            (None, None)
        };

        let final_grad_norm = problem.grad(&trace.last.x)?.norm();
        let final_f = trace.final_value();
        let summary = RunSummary {
            optimizer: kind,
            final_f,
            final_grad_norm: Some(final_grad_norm),
            iterations: trace.len(),
            restarts: trace.restarts.len(),
            f_star,
            final_suboptimality: metric.last().map(|m| m.1).filter(|v| v.is_finite()),
            iterations_to_threshold: metric.iter().position(|m| m.1 <= self.threshold),
            threshold: self.threshold,
            max_dist_x0: trace.max_dist_x0(),
            dist_x0_xstar: witness.as_ref().map(|w| x0.dist(&w.x_star)).transpose()?,
            wall_ns,
        };
        Ok(RunOutput {
            records: trace.records.clone(),
            restarts: trace.restarts.clone(),
            trace: Some(trace),
            metric,
            witness,
            certificate,
            segments,
            summary,
        })
    }
}

fn restart_config(config: &ExperimentConfig, f_star: f64, target: f64) -> RestartConfig {
    RestartConfig {
        alpha: config.alpha,
        c: config.c,
        f_star,
        target,
    }
}

/// Output of [`compare`]: one run per optimizer on a shared instance.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub instance_hash: String,
    pub threshold: f64,
    pub runs: Vec<RunOutput>,
}

impl Comparison {
    /// Long-format rows `optimizer,k,suboptimality,wall_ns`.
    pub fn long_rows(&self) -> Vec<(OptimizerKind, usize, f64, u64)> {
        self.runs
            .iter()
            .flat_map(|r| r.metric.iter().map(move |&(k, v, ns)| (r.summary.optimizer, k, v, ns)))
            .collect()
    }

    pub fn iterations_to_threshold(&self) -> Vec<(OptimizerKind, Option<usize>)> {
        self.runs
            .iter()
            .map(|r| (r.summary.optimizer, r.summary.iterations_to_threshold))
            .collect()
    }
}

/// Runs configurations that differ only in the optimizer, in parallel, on
/// one instance with one shared witness. `loaded` replaces generation as in
/// [`Experiment::prepare`].
pub fn compare(configs: &[ExperimentConfig], loaded: Option<(InstanceSpec, Instance)>) -> Result<Comparison> {
    let first = configs
        .first()
        .ok_or_else(|| Error::Invalid("compare needs at least one configuration".into()))?;
    let mut seen = Vec::new();
    for c in configs {
        let mut probe = c.clone();
        probe.optimizer = first.optimizer;
        probe.beta_rule = first.beta_rule;
        probe.mu = first.mu;
        probe.out = first.out.clone();
        if probe != *first {
            return Err(Error::Invalid(
                "compared configurations must differ only in optimizer (and its beta-rule or mu)".into(),
            ));
        }
        if seen.contains(&c.optimizer) {
            return Err(Error::Invalid(format!("optimizer {} listed twice", c.optimizer)));
        }
        seen.push(c.optimizer);
    }
    let exps = configs
        .iter()
        .map(|c| Experiment::prepare(c, loaded.clone()))
        .collect::<Result<Vec<_>>>()?;
    let hash = exps[0].instance.hash();
    if let Some(e) = exps.iter().find(|e| e.instance.hash() != hash) {
        return Err(Error::Invalid(format!(
            "instance mismatch: {} run sees a different instance",
            e.config.optimizer
        )));
    }
    let witness = if exps.iter().any(|e| e.config.optimizer != OptimizerKind::Gurvits) {
        Some(exps[0].witness()?)
    } else {
        None
    };
    let runs = std::thread::scope(|s| {
        let handles: Vec<_> = exps
            .iter()
            .map(|e| {
                let w = witness.clone().filter(|_| e.config.optimizer != OptimizerKind::Gurvits);
                s.spawn(move || e.run_with(w))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Comparison {
        instance_hash: hash,
        threshold: exps[0].threshold,
        runs,
    })
}

#[cfg(test)]
mod tests;
