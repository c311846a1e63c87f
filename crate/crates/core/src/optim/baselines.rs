//! Comparison methods: Riemannian gradient descent, the constant-momentum
//! RAGD of Zhang and Sra, and Gurvits' alternating normalisation.

use super::{IterRecord, OptConfig, OptState, OptimizerKind, StepPoints, Trace};
use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::manifold::{Point, Tangent};
use crate::problems::{Capacity, GurvitsState, Problem};

/// `exp_x(−grad/L)`.
pub fn rgd_step(x: &Point, grad: &Tangent, lipschitz: f64) -> Result<Point> {
    x.exp(&(grad * (-1.0 / lipschitz)))
}

/// Gradient descent with step `1/L`. Rows use `β = 1`, `a = A = 0` and
/// report the gradient at `x_k` in `grad_norm_y`.
pub fn run_rgd(problem: &dyn Problem, x0: &Point, cfg: &OptConfig) -> Result<Trace> {
    cfg.validate()?;
    let clock = Stopwatch::start();
    let f0 = problem.value(x0)?;
    let mut trace = Trace::new(OptimizerKind::Rgd, x0.clone(), f0);
    let mut x = x0.clone();
    let mut f_x = f0;
    for k in 0..cfg.max_iters {
        let step = || -> Result<(Tangent, Point, f64, f64)> {
            let g = problem.grad(&x)?;
            let next = rgd_step(&x, &g, cfg.lipschitz)?;
            let f_next = problem.value(&next)?;
            if !f_next.is_finite() {
                return Err(Error::NonFinite("objective at new iterate"));
            }
            let d = x0.dist(&next)?;
            Ok((g, next, f_next, d))
        };
        let (g, next, f_next, dist_x0) = step().map_err(|e| e.at(k))?;
        let grad_norm = g.norm();
        trace.records.push(IterRecord {
            k,
            f_x: f_next,
            f_y: f_x,
            grad_norm_y: grad_norm,
            beta: 1.0,
            a_next: 0.0,
            big_a: 0.0,
            cond2_margin: 0.0,
            dist_x0,
            wall_ns: clock.elapsed_ns(),
        });
        if cfg.keep_points {
            trace.points.push(StepPoints {
                x: x.clone(),
                v: x.clone(),
                y: x.clone(),
                grad_y: g,
            });
        }
        x = next;
        f_x = f_next;
        if grad_norm <= cfg.grad_tol {
            break;
        }
    }
    trace.last = OptState {
        v: x.clone(),
        x,
        big_a: 0.0,
        k: trace.records.len(),
        f_x,
    };
    Ok(trace)
}

/// Parameters of the constant-momentum scheme: step `h = 1/L`, shrink
/// `β = √(μh)/5`, initial `γ_0 = μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RagdParams {
    pub lipschitz: f64,
    pub mu: f64,
    pub h: f64,
    pub beta: f64,
    pub gamma0: f64,
}

impl RagdParams {
    pub fn new(lipschitz: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::Unavailable(format!(
                "RAGD needs a strong-convexity modulus mu > 0, got {mu}"
            )));
        }
        if !(lipschitz > 0.0) {
            return Err(Error::Invalid(format!("L must be positive, got {lipschitz}")));
        }
        let h = 1.0 / lipschitz;
        Ok(Self {
            lipschitz,
            mu,
            h,
            beta: (mu * h).sqrt() / 5.0,
            gamma0: mu,
        })
    }
}

#[derive(Clone, Debug)]
pub struct RagdState {
    pub x: Point,
    pub v: Point,
    pub gamma: f64,
    pub k: usize,
    pub f_x: f64,
}

impl RagdState {
    pub fn start(x0: Point, f_x0: f64, p: &RagdParams) -> Self {
        Self {
            v: x0.clone(),
            x: x0,
            gamma: p.gamma0,
            k: 0,
            f_x: f_x0,
        }
    }
}

/// One step of
///
/// ```text
/// α² = h((1−α)γ + αμ),  γ̄ = (1−α)γ + αμ
/// y  = exp_x(αγ/(γ + αμ) · log_x v)
/// x⁺ = exp_y(−h grad f(y))
/// v⁺ = exp_y(((1−α)γ/γ̄) log_y v − (α/γ̄) grad f(y))
/// γ⁺ = γ̄/(1 + β)
/// ```
///
/// The row stores the coupling coefficient in `beta`, `α` in `a_next` and
/// `γ⁺` in `big_a`.
pub fn ragd_baseline_step(
    state: &RagdState,
    problem: &dyn Problem,
    p: &RagdParams,
) -> Result<(RagdState, IterRecord)> {
    let inner = || -> Result<(RagdState, IterRecord)> {
        let (g0, mu, h) = (state.gamma, p.mu, p.h);
        let diff = h * (g0 - mu);
        let alpha = (-diff + (diff * diff + 4.0 * h * g0).sqrt()) / 2.0;
        let gbar = (1.0 - alpha) * g0 + alpha * mu;
        let coupling = alpha * g0 / (g0 + alpha * mu);

        let y = state.x.exp(&(state.x.log(&state.v)? * coupling))?;
        let f_y = problem.value(&y)?;
        let g = problem.grad(&y)?;
        let x_next = y.exp(&(&g * (-h)))?;
        let to_v = y.log(&state.v)?;
        let dir = &(to_v * ((1.0 - alpha) * g0 / gbar)) - &(&g * (alpha / gbar));
        let v_next = y.exp(&dir)?;
        let f_next = problem.value(&x_next)?;
        if !f_next.is_finite() {
            return Err(Error::NonFinite("objective at new iterate"));
        }
        let gamma = gbar / (1.0 + p.beta);
        let record = IterRecord {
            k: state.k,
            f_x: f_next,
            f_y,
            grad_norm_y: g.norm(),
            beta: coupling,
            a_next: alpha,
            big_a: gamma,
            cond2_margin: 0.0,
            dist_x0: 0.0,
            wall_ns: 0,
        };
        let next = RagdState {
            x: x_next,
            v: v_next,
            gamma,
            k: state.k + 1,
            f_x: f_next,
        };
        Ok((next, record))
    };
    inner().map_err(|e| e.at(state.k))
}

pub fn run_ragd(problem: &dyn Problem, x0: &Point, cfg: &OptConfig, mu: f64) -> Result<Trace> {
    cfg.validate()?;
    let p = RagdParams::new(cfg.lipschitz, mu)?;
    let clock = Stopwatch::start();
    let f0 = problem.value(x0)?;
    let mut trace = Trace::new(OptimizerKind::Ragd, x0.clone(), f0);
    let mut state = RagdState::start(x0.clone(), f0, &p);
    for _ in 0..cfg.max_iters {
        let k = state.k;
        let (next, mut rec) = ragd_baseline_step(&state, problem, &p)?;
        rec.dist_x0 = x0.dist(&next.x).map_err(|e| e.at(k))?;
        rec.wall_ns = clock.elapsed_ns();
        let done = rec.grad_norm_y <= cfg.grad_tol;
        trace.records.push(rec);
        state = next;
        if done {
            break;
        }
    }
    trace.last = OptState {
        x: state.x,
        v: state.v,
        big_a: state.gamma,
        k: state.k,
        f_x: state.f_x,
    };
    Ok(trace)
}

/// Residual `ds` before any step and after each of up to `max_iters`
/// Gurvits steps, with cumulative wall time; stops once `ds ≤ tol`.
pub fn run_gurvits(c: &Capacity, max_iters: usize, tol: f64) -> Result<Vec<(f64, u64)>> {
    let clock = Stopwatch::start();
    let mut s = GurvitsState::new(c);
    let mut out = vec![(s.residual(), 0)];
    for k in 0..max_iters {
        s.step().map_err(|e| e.at(k))?;
        let r = s.residual();
        out.push((r, clock.elapsed_ns()));
        if r <= tol {
            break;
        }
    }
    Ok(out)
}
