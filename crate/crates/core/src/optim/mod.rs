//! Iteration engines.
//!
//! Every driver produces a [`Trace`]. Row `k` describes step `k`: it holds
//! `f(y_k)`, `‖grad f(y_k)‖`, `β_k`, `a_{k+1}`, and the values at the new
//! iterate, `f(x_{k+1})`, `A_{k+1}` and `d(x_0, x_{k+1})`.

mod baselines;
mod ragdsdr;
mod restart;

pub use baselines::{
    ragd_baseline_step, rgd_step, run_gurvits, run_ragd, run_rgd, RagdParams, RagdState,
};
pub use ragdsdr::{ragdsdr_step, run_ragdsdr, StepOutput};
pub use restart::{run_restarted, segment_bound, segments, RestartConfig};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureConstants;
use crate::error::{Error, Result};
use crate::manifold::{Point, Tangent};
use crate::search::SearchConfig;

/// Positive root of `ζL·a² − a − A = 0`.
pub fn a_next(big_a: f64, zeta: f64, lipschitz: f64) -> f64 {
    let zl = zeta * lipschitz;
    (1.0 + (1.0 + 4.0 * zl * big_a).sqrt()) / (2.0 * zl)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaRule {
    /// Golden-section geodesic search.
    Search,
    /// `β_k = k/(k+2)`.
    Nesterov,
}

impl FromStr for BetaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "search" => Ok(Self::Search),
            "nesterov" => Ok(Self::Nesterov),
            other => Err(Error::Invalid(format!(
                "unknown beta rule '{other}' (expected search or nesterov)"
            ))),
        }
    }
}

impl fmt::Display for BetaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Search => "search",
            Self::Nesterov => "nesterov",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    Rgd,
    Ragdsdr,
    RagdsdrRestart,
    LinearCoupling,
    Ragd,
    Gurvits,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 6] = [
        Self::Rgd,
        Self::Ragdsdr,
        Self::RagdsdrRestart,
        Self::LinearCoupling,
        Self::Ragd,
        Self::Gurvits,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Rgd => "rgd",
            Self::Ragdsdr => "ragdsdr",
            Self::RagdsdrRestart => "ragdsdr-restart",
            Self::LinearCoupling => "linear-coupling",
            Self::Ragd => "ragd",
            Self::Gurvits => "gurvits",
        }
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.as_str()).collect();
                Error::Invalid(format!("unknown optimizer '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub lipschitz: f64,
    pub curvature: CurvatureConstants,
    /// Configured diameter bound `D` of the working domain.
    pub diameter: f64,
    pub beta_rule: BetaRule,
    pub search: SearchConfig,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Keep `x_k, v_k, y_k` and `grad f(y_k)` for every step.
    pub keep_points: bool,
}

impl OptConfig {
    pub fn new(lipschitz: f64, curvature: CurvatureConstants, diameter: f64) -> Self {
        Self {
            lipschitz,
            curvature,
            diameter,
            beta_rule: BetaRule::Search,
            search: SearchConfig::default(),
            max_iters: 300,
            grad_tol: 1e-10,
            keep_points: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lipschitz > 0.0) || !self.lipschitz.is_finite() {
            return Err(Error::Invalid(format!("L must be positive, got {}", self.lipschitz)));
        }
        if !(self.curvature.zeta >= 1.0) {
            return Err(Error::Invalid(format!("zeta must be >= 1, got {}", self.curvature.zeta)));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be >= 1".into()));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(Error::Invalid("grad_tol must be non-negative".into()));
        }
        self.search.validate()
    }
}

/// Iterate pair `(x_k, v_k)` with the accumulated weight `A_k`.
#[derive(Clone, Debug)]
pub struct OptState {
    pub x: Point,
    pub v: Point,
    pub big_a: f64,
    pub k: usize,
    /// `f(x_k)`.
    pub f_x: f64,
}

impl OptState {
    /// `x_0 = v_0`, `A_0 = 0`.
    pub fn start(x0: Point, f_x0: f64) -> Self {
        Self {
            v: x0.clone(),
            x: x0,
            big_a: 0.0,
            k: 0,
            f_x: f_x0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub k: usize,
    pub f_x: f64,
    pub f_y: f64,
    pub grad_norm_y: f64,
    pub beta: f64,
    pub a_next: f64,
    pub big_a: f64,
    pub cond2_margin: f64,
    pub dist_x0: f64,
    pub wall_ns: u64,
}

impl IterRecord {
    pub const HEADER: [&'static str; 10] = [
        "k",
        "f_x",
        "f_y",
        "grad_norm_y",
        "beta",
        "a_next",
        "big_a",
        "cond2_margin",
        "dist_x0",
        "wall_ns",
    ];

    pub fn is_finite(&self) -> bool {
        [
            self.f_x,
            self.f_y,
            self.grad_norm_y,
            self.beta,
            self.a_next,
            self.big_a,
            self.cond2_margin,
            self.dist_x0,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Points of one step, kept in full-point mode.
#[derive(Clone, Debug)]
pub struct StepPoints {
    pub x: Point,
    pub v: Point,
    pub y: Point,
    pub grad_y: Tangent,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub optimizer: OptimizerKind,
    pub records: Vec<IterRecord>,
    /// One entry per record in full-point mode, else empty.
    pub points: Vec<StepPoints>,
    /// Rows after which the restarted method reset `A` and `v`.
    pub restarts: Vec<usize>,
    pub x0: Point,
    pub f_x0: f64,
    /// State after the last step.
    pub last: OptState,
}

impl Trace {
    pub fn new(optimizer: OptimizerKind, x0: Point, f_x0: f64) -> Self {
        Self {
            optimizer,
            records: Vec::new(),
            points: Vec::new(),
            restarts: Vec::new(),
            last: OptState::start(x0.clone(), f_x0),
            x0,
            f_x0,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_value(&self) -> f64 {
        self.records.last().map_or(self.f_x0, |r| r.f_x)
    }

    /// `f(x_k)` for `k = 0..=len`.
    pub fn values(&self) -> Vec<f64> {
        std::iter::once(self.f_x0)
            .chain(self.records.iter().map(|r| r.f_x))
            .collect()
    }

    /// `x_k` for `k = 0..=len` (full-point mode only).
    pub fn iterates(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self.points.iter().map(|p| p.x.clone()).collect();
        out.push(self.last.x.clone());
        out
    }

    /// First `k` with `f(x_k) − f_star ≤ threshold`.
    pub fn iterations_to(&self, f_star: f64, threshold: f64) -> Option<usize> {
        self.values().iter().position(|f| f - f_star <= threshold)
    }

    pub fn max_dist_x0(&self) -> f64 {
        self.records.iter().map(|r| r.dist_x0).fold(0.0, f64::max)
    }
}
