use serde::{Deserialize, Serialize};

use super::ragdsdr::step_unindexed;
use super::{OptConfig, OptState, OptimizerKind, Trace};
use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::problems::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartConfig {
    /// Weak-quasi-convexity constant, in `(0, 1]`.
    pub alpha: f64,
    /// Contraction constant, `> 1`.
    pub c: f64,
    /// Known optimal value.
    pub f_star: f64,
    /// Stop once `f(x) − f_star` is at most this.
    pub target: f64,
}

impl RestartConfig {
    pub fn new(f_star: f64) -> Self {
        Self {
            alpha: 1.0,
            c: 2.0,
            f_star,
            target: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.c > 1.0) || !self.c.is_finite() {
            return Err(Error::Invalid(format!("c must exceed 1, got {}", self.c)));
        }
        if !self.f_star.is_finite() {
            return Err(Error::NonFinite("f_star"));
        }
        if !(self.target >= 0.0) {
            return Err(Error::Invalid("restart target must be non-negative".into()));
        }
        Ok(())
    }

    /// `1 − α/c`.
    pub fn contraction(&self) -> f64 {
        1.0 - self.alpha / self.c
    }

    fn tolerance(&self) -> f64 {
        1e-12 * self.f_star.abs().max(1.0)
    }
}

/// Steps after which a segment starting at suboptimality `eps_i` is
/// guaranteed to have contracted:
///
/// ```text
/// A_i = (c−1)α/c · ε_i − ε̃
/// N_i = ⌈ b/2 + √((b/2)² + 4ζLD²/A_i) ⌉,   b = d(M)·ζLD²/A_i
/// ```
///
/// `None` when `A_i ≤ 0`, where the search error swamps the target.
pub fn segment_bound(eps_i: f64, rc: &RestartConfig, eps_tilde: f64, cfg: &OptConfig) -> Option<usize> {
    let a_i = (rc.c - 1.0) * rc.alpha / rc.c * eps_i - eps_tilde;
    if !(a_i > 0.0) {
        return None;
    }
    let q = cfg.curvature.zeta * cfg.lipschitz * cfg.diameter * cfg.diameter;
    let half_b = cfg.curvature.discrepancy * q / a_i / 2.0;
    let n = half_b + (half_b * half_b + 4.0 * q / a_i).sqrt();
    if n.is_finite() && n < usize::MAX as f64 {
        Some(n.ceil() as usize)
    } else {
        None
    }
}

/// RAGDsDR restarted with `A = 0`, `v = x` whenever the
/// suboptimality has contracted by `1 − α/c` since the segment began.
///
/// A segment that runs for ten times the first segment's bound without
/// contracting aborts with [`Error::RestartBudget`].
pub fn run_restarted(
    problem: &dyn Problem,
    x0: &Point,
    cfg: &OptConfig,
    rc: &RestartConfig,
) -> Result<Trace> {
    cfg.validate()?;
    rc.validate()?;
    let clock = Stopwatch::start();
    let f0 = problem.value(x0)?;
    if f0 < rc.f_star - rc.tolerance() {
        return Err(Error::InvalidOptimum {
            f_star: rc.f_star,
            observed: f0,
        });
    }
    let mut trace = Trace::new(OptimizerKind::RagdsdrRestart, x0.clone(), f0);
    let budget = segment_bound(f0 - rc.f_star, rc, cfg.search.eps_tilde, cfg)
        .map(|n| n.saturating_mul(10));

    let mut state = OptState::start(x0.clone(), f0);
    let mut seg_eps = f0 - rc.f_star;
    let mut seg_steps = 0usize;
    if seg_eps <= rc.target {
        trace.last = state;
        return Ok(trace);
    }

    for global in 0..cfg.max_iters {
        let mut out = step_unindexed(&state, problem, cfg).map_err(|e| e.at(global))?;
        let f_next = out.record.f_x;
        if f_next < rc.f_star - rc.tolerance() {
            return Err(Error::InvalidOptimum {
                f_star: rc.f_star,
                observed: f_next,
            }
            .at(global));
        }
        out.record.k = global;
        out.record.dist_x0 = x0.dist(&out.state.x).map_err(|e| e.at(global))?;
        out.record.wall_ns = clock.elapsed_ns();
        let grad_done = out.record.grad_norm_y <= cfg.grad_tol;
        trace.records.push(out.record);
        if cfg.keep_points {
            trace.points.push(out.points);
        }
        state = out.state;
        seg_steps += 1;

        let sub = f_next - rc.f_star;
        if grad_done || sub <= rc.target {
            break;
        }
        if sub <= rc.contraction() * seg_eps {
            trace.restarts.push(global);
            state = OptState::start(state.x, f_next);
            seg_eps = sub;
            seg_steps = 0;
        } else if budget.is_some_and(|b| seg_steps >= b) {
            return Err(Error::RestartBudget {
                budget: budget.unwrap_or_default(),
            }
            .at(global));
        }
    }
    trace.last = state;
    Ok(trace)
}

/// `(first row, length, suboptimality at start)` of each restart segment.
pub fn segments(trace: &Trace, f_star: f64) -> Vec<(usize, usize, f64)> {
    let values = trace.values();
    let mut out = Vec::new();
    let mut start = 0usize;
    for &r in &trace.restarts {
        out.push((start, r + 1 - start, values[start] - f_star));
        start = r + 1;
    }
    if start < trace.records.len() {
        out.push((start, trace.records.len() - start, values[start] - f_star));
    }
    out
}
